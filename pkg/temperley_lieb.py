#!/usr/bin/env python3
"""
Temperley-Lieb diagram monoid.

A diagram on N strands is a planar pairing of the endpoints t1..tN (top)
and b1..bN (bottom) together with a power of tau counting closed loops.
Internally endpoint t_j has index j-1 and b_j has index N+j-1; `pairing`
maps every index to its partner.

Scalars are tracked only as the exponent of tau.
"""

import logging
import re
import sys
from dataclasses import dataclass

import numpy as np

from errors import IndexOutOfRange, InvalidMatching, SizeMismatch, UsageError
from meander_core import ClosedMeander, arches_cross_stack

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TLWord:
    strand_count: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strand_count < 1:
            raise UsageError(f"Strand count must be positive, got {self.strand_count}")
        object.__setattr__(self, "letters", tuple(int(i) for i in self.letters))
        for i in self.letters:
            if not 1 <= i <= self.strand_count - 1:
                raise IndexOutOfRange(f"Generator e_{i} not in TL_{self.strand_count}")

    def __str__(self) -> str:
        return f"N={self.strand_count}: " + " ".join(map(str, self.letters))


@dataclass(frozen=True)
class TLDiagram:
    N: int
    pairing: tuple[int, ...]
    loop_exponent: int = 0

    def __post_init__(self):
        if len(self.pairing) != 2 * self.N:
            raise InvalidMatching(f"Pairing of TL_{self.N} needs {2 * self.N} endpoints")
        for a, b in enumerate(self.pairing):
            if a == b or self.pairing[b] != a:
                raise InvalidMatching(f"Endpoint {self.label(a)} is not matched consistently")

    def label(self, idx: int) -> str:
        return f"t{idx + 1}" if idx < self.N else f"b{idx - self.N + 1}"

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in enumerate(self.pairing) if a < b]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "pairs": [[self.label(a), self.label(b)] for a, b in self.pairs()],
            "loop_exponent": self.loop_exponent,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TLDiagram":
        N = int(data["N"])

        def index(label: str) -> int:
            side, j = label[0], int(label[1:])
            if side not in "tb" or not 1 <= j <= N:
                raise InvalidMatching(f"Bad endpoint label {label!r}")
            return j - 1 if side == "t" else N + j - 1

        pairing = [None] * (2 * N)
        for a, b in data["pairs"]:
            ia, ib = index(a), index(b)
            pairing[ia], pairing[ib] = ib, ia
        if None in pairing:
            raise InvalidMatching("Not every endpoint is paired")
        return cls(N=N, pairing=tuple(pairing), loop_exponent=int(data.get("loop_exponent", 0)))


def parse_word(text: str) -> TLWord:
    """Parse "N=4: 2 1 3"."""
    match = re.fullmatch(r"\s*N\s*=\s*(\d+)\s*:?\s*([\d\s,]*)", text)
    if not match:
        raise UsageError(f"Expected a word like 'N=4: 2 1 3', got {text!r}")
    letters = [int(x) for x in re.split(r"[\s,]+", match.group(2).strip()) if x]
    return TLWord(int(match.group(1)), tuple(letters))


def identity_diagram(N: int) -> TLDiagram:
    return TLDiagram(N, tuple(list(range(N, 2 * N)) + list(range(N))))


def generator_diagram(i: int, N: int) -> TLDiagram:
    """e_i: cap on t_i, t_{i+1}, cup on b_i, b_{i+1}, all other strands through."""
    if not 1 <= i <= N - 1:
        raise IndexOutOfRange(f"Generator e_{i} not in TL_{N}")
    pairing = list(identity_diagram(N).pairing)
    top, bottom = i - 1, N + i - 1
    pairing[top], pairing[top + 1] = top + 1, top
    pairing[bottom], pairing[bottom + 1] = bottom + 1, bottom
    return TLDiagram(N, tuple(pairing))


def is_planar(d: TLDiagram) -> bool:
    """Noncrossing when endpoints sit around the strip in order t1..tN, bN..b1."""
    def around(idx: int) -> int:
        return idx + 1 if idx < d.N else 3 * d.N - idx
    return not arches_cross_stack([tuple(sorted((around(a), around(b)))) for a, b in d.pairs()])


def compose(d1: TLDiagram, d2: TLDiagram) -> TLDiagram:
    """
    Stack d1 on top of d2 and glue d1's bottom row to d2's top row.

    Glued nodes of the stack use combined indices: d1 endpoints 0..2N-1,
    d2 endpoints 2N..4N-1, so the glue line is N..2N-1 (d1) = 2N..3N-1 (d2).
    """
    if d1.N != d2.N:
        raise SizeMismatch(f"Cannot compose TL_{d1.N} with TL_{d2.N}")
    N = d1.N

    def partner(node: int) -> int:
        return d1.pairing[node] if node < 2 * N else 2 * N + d2.pairing[node - 2 * N]

    def on_glue(node: int) -> bool:
        return N <= node < 3 * N

    def twin(node: int) -> int:
        return node + N if node < 2 * N else node - N

    def outer(node: int) -> int:
        return node if node < N else node - 2 * N

    glued = set()
    pairing = [None] * (2 * N)
    for start in list(range(N)) + list(range(3 * N, 4 * N)):
        if pairing[outer(start)] is not None:
            continue
        cur = partner(start)
        while on_glue(cur):
            glued.add(cur if cur < 2 * N else cur - N)
            cur = partner(twin(cur))
        pairing[outer(start)], pairing[outer(cur)] = outer(cur), outer(start)

    loops = 0
    for node in range(N, 2 * N):
        if node in glued:
            continue
        loops += 1
        cur = node
        while True:
            glued.add(cur if cur < 2 * N else cur - N)
            cur = partner(twin(cur))
            if cur == node:
                break

    return TLDiagram(N, tuple(pairing), d1.loop_exponent + d2.loop_exponent + loops)


def eval_word(w: TLWord) -> TLDiagram:
    """Left-to-right fold of compose; the first letter ends up on top."""
    d = identity_diagram(w.strand_count)
    for i in w.letters:
        d = compose(d, generator_diagram(i, w.strand_count))
    return d


def closure_loops(d: TLDiagram) -> int:
    """Loops formed when every t_j is joined to b_j around the outside of the strip."""
    N = d.N
    seen = [False] * (2 * N)
    loops = 0
    for start in range(2 * N):
        if seen[start]:
            continue
        loops += 1
        cur = start
        while not seen[cur]:
            seen[cur] = True
            mate = d.pairing[cur]
            seen[mate] = True
            cur = mate + N if mate < N else mate - N
    return loops


def markov_trace_exponent(w: TLWord) -> int:
    """Exponent c of tr(e) = tau^c: interior loops plus closure loops."""
    d = eval_word(w)
    return d.loop_exponent + closure_loops(d)


@dataclass(frozen=True)
class MeanderTranslation:
    meander: ClosedMeander
    interior_loops: int


def word_to_meander(w: TLWord) -> MeanderTranslation:
    """
    Open the closed-up diagram onto a line: t_j -> j, b_j -> 2N+1-j.

    The closure strands become the full lower rainbow, so the meander's
    component count is the trace exponent minus the interior loops.
    """
    d = eval_word(w)
    N = d.N
    size = 2 * N

    def on_line(idx: int) -> int:
        return idx + 1 if idx < N else size + 1 - (idx - N + 1)

    upper = tuple((on_line(a), on_line(b)) for a, b in d.pairs())
    lower = tuple((k, size + 1 - k) for k in range(1, N + 1))
    return MeanderTranslation(ClosedMeander(n=size, upper=upper, lower=lower), d.loop_exponent)


def random_word(N: int, length: int, rng: np.random.Generator) -> TLWord:
    if N < 2:
        return TLWord(N, ())
    return TLWord(N, tuple(int(i) for i in rng.integers(1, N, size=length)))


if __name__ == "__main__":
    # Quick test
    from meander_core import count_components

    w = parse_word(sys.argv[1] if len(sys.argv) > 1 else "N=4: 2 1 3")
    d = eval_word(w)
    print(f"Word: {w}")
    print(f"Diagram: {d.to_dict()}")
    print(f"Trace exponent: {markov_trace_exponent(w)}")
    print(f"Meander components: {count_components(word_to_meander(w).meander)}")
