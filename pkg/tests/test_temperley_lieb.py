import numpy as np
import pytest

from errors import IndexOutOfRange, InvalidMatching, SizeMismatch, UsageError
from meander_core import count_components
from temperley_lieb import (
    TLDiagram,
    TLWord,
    closure_loops,
    compose,
    eval_word,
    generator_diagram,
    identity_diagram,
    is_planar,
    markov_trace_exponent,
    parse_word,
    random_word,
    word_to_meander,
)


def pair_labels(d):
    return sorted(tuple(p) for p in d.to_dict()["pairs"])


def test_parse_word():
    assert parse_word("N=4: 2 1 3") == TLWord(4, (2, 1, 3))
    assert parse_word("N=3:") == TLWord(3, ())
    assert parse_word("N=5: 1,4") == TLWord(5, (1, 4))
    with pytest.raises(UsageError):
        parse_word("4: 2 1")
    with pytest.raises(IndexOutOfRange):
        parse_word("N=3: 3")


def test_generator_diagrams():
    assert pair_labels(generator_diagram(1, 2)) == [("b1", "b2"), ("t1", "t2")]
    assert pair_labels(generator_diagram(2, 4)) == [("b2", "b3"), ("t1", "b1"), ("t2", "t3"), ("t4", "b4")]
    with pytest.raises(IndexOutOfRange):
        generator_diagram(4, 4)


def test_diagram_validation_and_round_trip():
    with pytest.raises(InvalidMatching):
        TLDiagram(2, (1, 0, 3))
    with pytest.raises(InvalidMatching):
        TLDiagram(2, (1, 2, 3, 0))
    d = eval_word(TLWord(5, (2, 4, 1, 3, 3)))
    assert TLDiagram.from_dict(d.to_dict()) == d


def test_compose_size_mismatch():
    with pytest.raises(SizeMismatch):
        compose(identity_diagram(3), identity_diagram(4))


def test_idempotent_relation_example():
    e2 = generator_diagram(2, 4)
    squared = compose(e2, e2)
    assert squared.pairing == e2.pairing
    assert squared.loop_exponent == 1


def test_braid_relation_example():
    e1, e2 = generator_diagram(1, 4), generator_diagram(2, 4)
    result = compose(e2, compose(e1, e2))
    assert result == e2


@pytest.mark.parametrize("N", range(2, 9))
def test_relations_exhaustive(N):
    gens = {i: generator_diagram(i, N) for i in range(1, N)}
    for i, ei in gens.items():
        sq = compose(ei, ei)
        assert sq.pairing == ei.pairing and sq.loop_exponent == 1
        for j, ej in gens.items():
            if abs(i - j) > 1:
                assert compose(ei, ej) == compose(ej, ei)
            if abs(i - j) == 1:
                assert compose(compose(ei, ej), ei) == ei


def test_eval_word_examples():
    d = eval_word(TLWord(4, (2, 1, 3)))
    assert pair_labels(d) == [("b1", "b2"), ("b3", "b4"), ("t1", "t4"), ("t2", "t3")]
    assert d.loop_exponent == 0
    assert eval_word(TLWord(4, ())) == identity_diagram(4)
    d = eval_word(TLWord(4, (2, 2)))
    assert d.pairing == generator_diagram(2, 4).pairing
    assert d.loop_exponent == 1


def test_markov_trace_examples():
    assert markov_trace_exponent(TLWord(4, (2, 1, 3))) == 1
    for N in range(1, 7):
        assert markov_trace_exponent(TLWord(N, ())) == N
    assert markov_trace_exponent(TLWord(2, (1,))) == 1


def test_word_to_meander_examples():
    t = word_to_meander(TLWord(4, (2, 1, 3)))
    assert t.meander.n == 8
    assert t.meander.lower == ((1, 8), (2, 7), (3, 6), (4, 5))
    assert count_components(t.meander) == 1

    assert count_components(word_to_meander(TLWord(2, ())).meander) == 2
    t = word_to_meander(TLWord(2, (1,)))
    assert t.meander.n == 4
    assert count_components(t.meander) == 1


def test_random_words_trace_matches_meander_route():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        N = int(rng.integers(2, 9))
        w = random_word(N, int(rng.integers(0, 21)), rng)
        d = eval_word(w)
        assert is_planar(d)
        t = word_to_meander(w)
        assert t.interior_loops == d.loop_exponent
        assert markov_trace_exponent(w) == t.interior_loops + count_components(t.meander)
        assert closure_loops(d) == count_components(t.meander)


def test_associativity_on_random_triples():
    rng = np.random.default_rng(11)
    for _ in range(200):
        N = int(rng.integers(2, 8))
        a, b, c = (eval_word(random_word(N, int(rng.integers(0, 8)), rng)) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_random_word_trivial_strand_count():
    assert random_word(1, 5, np.random.default_rng(0)) == TLWord(1, ())
