#!/usr/bin/env python3
"""
Meander permutations and arch diagrams.

A permutation sigma in S_n records how a curve (the river) crosses a line
(the road): sigma(road position) = river label. Consecutive river labels
j, j+1 are joined by an arch drawn above the road for odd j and below it
for even j. sigma is a meander permutation when neither family of arches
crosses itself, and a Sturm permutation when it is additionally dissipative
(fixes 1 and n) and Morse (all partial winding sums are nonnegative).

Closed meanders are pairs of noncrossing perfect matchings on 1..n; their
component count is what the seaweed, billiard and Temperley-Lieb modules
all reduce to.

Usage:
    python meander_core.py 1,4,3,2,5
"""

import itertools
import logging
import sys
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from config import ENUMERATION_BOUND
from errors import (
    ArchCrossing,
    BoundExceeded,
    EmptyPermutation,
    InvalidMatching,
    NotABijection,
    NotDissipative,
    ParityViolation,
    Unsupported,
    ValidationError,
)
from workers import run_chunks

logger = logging.getLogger(__name__)

Arch = tuple[int, int]


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True, order=True)
class Permutation:
    """One-line notation sigma(1..n); ordering is lexicographic on the image."""
    image: tuple[int, ...]

    def __post_init__(self):
        if len(self.image) == 0:
            raise EmptyPermutation("Permutation is empty")
        if sorted(self.image) != list(range(1, len(self.image) + 1)):
            raise NotABijection(f"Not a permutation of 1..{len(self.image)}: {list(self.image)}")

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, j: int) -> int:
        return self.image[j - 1]

    @cached_property
    def positions(self) -> tuple[int, ...]:
        """positions[j-1] = sigma^-1(j), the road position of river label j."""
        inv = [0] * self.n
        for pos, label in enumerate(self.image, start=1):
            inv[label - 1] = pos
        return tuple(inv)

    def inverse(self) -> "Permutation":
        return Permutation(self.positions)

    def reversed_conjugate(self) -> "Permutation":
        """kappa o sigma o kappa with kappa(j) = n+1-j."""
        n = self.n
        return Permutation(tuple(n + 1 - self.image[n - j] for j in range(1, n + 1)))

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))


@dataclass(frozen=True)
class MorseVector:
    indices: tuple[int, ...]

    @property
    def is_morse(self) -> bool:
        return all(i >= 0 for i in self.indices)


@dataclass(frozen=True)
class OpenMeander:
    perm: Permutation
    upper_arches: tuple[Arch, ...]
    lower_arches: tuple[Arch, ...]

    @property
    def n(self) -> int:
        return self.perm.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "perm": list(self.perm.image),
            "upper": [list(a) for a in self.upper_arches],
            "lower": [list(a) for a in self.lower_arches],
        }


@dataclass(frozen=True)
class ClosedMeander:
    """Two noncrossing perfect matchings on vertices 1..n, stored sorted."""
    n: int
    upper: tuple[Arch, ...]
    lower: tuple[Arch, ...]

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise InvalidMatching(f"Closed meander needs an even positive vertex count, got {self.n}")
        object.__setattr__(self, "upper", _normalize_matching(self.upper, self.n, "upper"))
        object.__setattr__(self, "lower", _normalize_matching(self.lower, self.n, "lower"))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "upper": [list(a) for a in self.upper],
            "lower": [list(a) for a in self.lower],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClosedMeander":
        try:
            return cls(
                n=int(data["n"]),
                upper=tuple(tuple(a) for a in data["upper"]),
                lower=tuple(tuple(a) for a in data["lower"]),
            )
        except (KeyError, TypeError) as e:
            raise InvalidMatching(f"Malformed closed meander JSON: {e}")


def _normalize_matching(pairs, n: int, side: str) -> tuple[Arch, ...]:
    arches = tuple(sorted((min(a, b), max(a, b)) for a, b in pairs))
    seen = [v for arch in arches for v in arch]
    if sorted(seen) != list(range(1, n + 1)):
        raise InvalidMatching(f"{side} arches are not a perfect matching of 1..{n}")
    if arches_cross_stack(arches):
        raise InvalidMatching(f"{side} arches cross")
    return arches


# =============================================================================
# PARSING AND CROSSING CHECKS
# =============================================================================

def parse_permutation(text: str) -> Permutation:
    """Parse one-line notation such as "1,4,3,2,5"."""
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise EmptyPermutation("Permutation is empty")
    try:
        image = tuple(int(p) for p in parts)
    except ValueError:
        raise NotABijection(f"Permutation entries must be integers: {text!r}")
    return Permutation(image)


def arches_cross_pairwise(arches) -> bool:
    """O(n^2) check: some pair (a,b), (c,d) interleaves as a<c<b<d."""
    arches = list(arches)
    for i in range(len(arches)):
        a, b = arches[i]
        for c, d in arches[i + 1:]:
            if (a < c < b < d) or (c < a < d < b):
                return True
    return False


def arches_cross_stack(arches) -> bool:
    """
    O(n) check: one pass over positions 1..n with a stack of open arches.

    Endpoints are bucketed by position instead of sorted. Arches sharing an
    endpoint do not count as crossing, matching the strict inequalities of
    the pairwise check.
    """
    arches = list(arches)
    if not arches:
        return False
    top = max(max(arc) for arc in arches)
    opens = [[] for _ in range(top + 1)]
    closes = [[] for _ in range(top + 1)]
    for idx, (a, b) in enumerate(arches):
        opens[a].append((-b, idx))
        closes[b].append((-a, idx))

    stack = []
    for p in range(top + 1):
        # closes before opens; inner arches close first, outer ones open first
        for _, idx in sorted(closes[p]):
            if not stack or stack[-1] != idx:
                return True
            stack.pop()
        stack.extend(idx for _, idx in sorted(opens[p]))
    return False


# =============================================================================
# OPEN MEANDERS AND THE STURM PREDICATE
# =============================================================================

def open_meander_arches(sigma: Permutation) -> OpenMeander:
    """
    Build the arch diagram of sigma.

    Raises:
        ParityViolation: n is even
        ArchCrossing: an arch family crosses itself
    """
    n = sigma.n
    if n % 2 == 0:
        raise ParityViolation(f"Open meanders have an odd number of crossings, got n={n}")

    pos = sigma.positions
    upper, lower = [], []
    for j in range(1, n):
        a, b = sorted((pos[j - 1], pos[j]))
        (upper if j % 2 == 1 else lower).append((a, b))

    upper.sort()
    lower.sort()
    for side, arches in (("upper", upper), ("lower", lower)):
        if arches_cross_stack(arches):
            raise ArchCrossing(f"{side} arches of {sigma} cross")
    return OpenMeander(perm=sigma, upper_arches=tuple(upper), lower_arches=tuple(lower))


def is_meander(sigma: Permutation) -> bool:
    try:
        open_meander_arches(sigma)
    except ValidationError:
        return False
    return True


def is_dissipative(sigma: Permutation) -> bool:
    return sigma(1) == 1 and sigma(sigma.n) == sigma.n


def morse_vector(sigma: Permutation) -> MorseVector:
    """i_k = sum_{j<k} (-1)^(j+1) sign(sigma^-1(j+1) - sigma^-1(j))."""
    pos = np.asarray(sigma.positions)
    steps = np.sign(np.diff(pos))
    alternation = np.where(np.arange(1, sigma.n) % 2 == 1, 1, -1)
    partial = np.concatenate(([0], np.cumsum(alternation * steps)))
    return MorseVector(tuple(int(x) for x in partial))


def is_sturm(sigma: Permutation) -> bool:
    return is_dissipative(sigma) and is_meander(sigma) and morse_vector(sigma).is_morse


def chafee_infante(n: int) -> Permutation:
    """
    Sturm permutation of the symmetric cubic with all n equilibria present:
    sigma(j) = j for odd j, n+1-j for even j. Its Morse indices climb to
    (n-1)/2 in the middle.
    """
    if n % 2 == 0:
        raise ParityViolation(f"n must be odd, got {n}")
    return Permutation(tuple(j if j % 2 else n + 1 - j for j in range(1, n + 1)))


# =============================================================================
# ENUMERATION
# =============================================================================

def _check_enumeration_size(n: int):
    if n < 1:
        raise EmptyPermutation(f"n must be positive, got {n}")
    if n % 2 == 0:
        raise ParityViolation(f"Sturm permutations exist only for odd n, got {n}")


def _brute_force_chunk(task: tuple[int, int]) -> list[tuple[int, ...]]:
    """All Sturm permutations of S_n with sigma(1)=1, sigma(n)=n and the given sigma(2)."""
    n, second = task
    rest = [x for x in range(2, n) if x != second]
    found = []
    for tail in itertools.permutations(rest):
        image = (1, second, *tail, n)
        if is_sturm(Permutation(image)):
            found.append(image)
    return found


def enumerate_sturm_brute(n: int, bound: int = ENUMERATION_BOUND, jobs: int = 1,
                          show_progress: bool = False) -> list[Permutation]:
    """
    Reference enumerator: every permutation fixing 1 and n, filtered by is_sturm.

    Work is split by sigma(2); chunks are merged in sigma(2) order, so the
    result is lexicographic regardless of jobs.
    """
    _check_enumeration_size(n)
    if n > bound:
        raise BoundExceeded(f"Brute-force enumeration is limited to n <= {bound}, got {n}")
    if n == 1:
        return [Permutation((1,))]
    if n == 3:
        return [Permutation((1, 2, 3))]

    tasks = [(n, second) for second in range(2, n)]
    chunks = run_chunks(_brute_force_chunk, tasks, jobs=jobs,
                        desc=f"Enumerating S_{n}", show_progress=show_progress)
    return [Permutation(image) for chunk in chunks for image in chunk]


def noncrossing_matchings(positions) -> list[tuple[Arch, ...]]:
    """All noncrossing perfect matchings of the given increasing positions."""
    positions = tuple(positions)
    if not positions:
        return [()]
    if len(positions) % 2:
        return []
    first = positions[0]
    result = []
    for k in range(1, len(positions), 2):
        for inside in noncrossing_matchings(positions[1:k]):
            for outside in noncrossing_matchings(positions[k + 1:]):
                result.append(tuple(sorted(((first, positions[k]),) + inside + outside)))
    return result


def _walk_river(n: int, upper: tuple[Arch, ...], lower: tuple[Arch, ...]) -> list[int] | None:
    """Follow upper/lower arches from position 1; None unless every position is visited."""
    up, low = {}, {}
    for a, b in upper:
        up[a], up[b] = b, a
    for a, b in lower:
        low[a], low[b] = b, a

    path = [1]
    use_upper = True
    while True:
        nxt = (up if use_upper else low).get(path[-1])
        if nxt is None:
            break
        path.append(nxt)
        use_upper = not use_upper
    return path if len(path) == n else None


def enumerate_sturm_arches(n: int) -> list[Permutation]:
    """
    Arch-based enumerator.

    A dissipative open meander on n crossings is a noncrossing matching on
    positions 1..n-1 (upper) and one on 2..n (lower) whose alternating walk
    from position 1 passes every position. Each walk gives sigma^-1 directly;
    the Morse filter then leaves the Sturm permutations.
    """
    _check_enumeration_size(n)
    if n == 1:
        return [Permutation((1,))]

    found = []
    uppers = noncrossing_matchings(range(1, n))
    lowers = noncrossing_matchings(range(2, n + 1))
    logger.debug("S_%d: %d upper x %d lower arch systems", n, len(uppers), len(lowers))
    for upper in uppers:
        for lower in lowers:
            path = _walk_river(n, upper, lower)
            if path is None:
                continue
            sigma = Permutation(path).inverse()
            if morse_vector(sigma).is_morse:
                found.append(sigma)
    return sorted(found)


def enumerate_sturm(n: int, method: str = "brute", bound: int = ENUMERATION_BOUND,
                    jobs: int = 1, show_progress: bool = False) -> list[Permutation]:
    """
    All Sturm permutations in S_n, lexicographically sorted.

    Args:
        n: odd number of equilibria
        method: "brute" (reference, bounded by `bound`) or "arches"
        jobs: worker processes for the brute-force split

    Returns:
        List of Permutation
    """
    if method == "brute":
        return enumerate_sturm_brute(n, bound=bound, jobs=jobs, show_progress=show_progress)
    if method == "arches":
        return enumerate_sturm_arches(n)
    raise Unsupported(f"Unknown enumeration method: {method}")


def symmetry_orbit(sigma: Permutation) -> frozenset[Permutation]:
    """Orbit under inversion and conjugation by the reversal kappa(j) = n+1-j."""
    inv = sigma.inverse()
    return frozenset({sigma, inv, sigma.reversed_conjugate(), inv.reversed_conjugate()})


def canonical_form(sigma: Permutation) -> Permutation:
    return min(symmetry_orbit(sigma))


# =============================================================================
# CLOSED MEANDERS
# =============================================================================

def components(m: ClosedMeander) -> list[list[int]]:
    """Vertex cycles obtained by alternately following upper and lower arches."""
    up, low = {}, {}
    for a, b in m.upper:
        up[a], up[b] = b, a
    for a, b in m.lower:
        low[a], low[b] = b, a

    seen = set()
    cycles = []
    for start in range(1, m.n + 1):
        if start in seen:
            continue
        cycle = []
        v, use_upper = start, True
        while True:
            cycle.append(v)
            seen.add(v)
            v = (up if use_upper else low)[v]
            use_upper = not use_upper
            if v == start and use_upper:
                break
        cycles.append(cycle)
    return cycles


def count_components(m: ClosedMeander) -> int:
    return len(components(m))


def close_open_meander(om: OpenMeander) -> ClosedMeander:
    """
    Close a dissipative open meander into a single closed curve.

    The upper arch (1, p) with p = sigma^-1(2) is replaced by (p, n), road
    position 1 is deleted and positions 2..n are relabeled 1..n-1.

    Raises:
        NotDissipative: sigma(1) != 1 or sigma(n) != n
    """
    sigma, n = om.perm, om.n
    if not is_dissipative(sigma):
        raise NotDissipative(f"{sigma} is not dissipative")
    if n < 3:
        raise Unsupported("Closing needs at least 3 crossings")

    p = sigma.positions[1]
    upper = [arch for arch in om.upper_arches if arch != (1, p)]
    upper.append((p, n))
    return ClosedMeander(
        n=n - 1,
        upper=tuple((a - 1, b - 1) for a, b in upper),
        lower=tuple((a - 1, b - 1) for a, b in om.lower_arches),
    )


def open_to_rainbow(m: ClosedMeander) -> ClosedMeander:
    """
    Double the vertices and open the road: lower arch (i, j) becomes the
    upper arch (2n+1-j, 2n+1-i), and the new lower system is the full rainbow.
    """
    size = 2 * m.n
    mirrored = tuple((size + 1 - j, size + 1 - i) for i, j in m.lower)
    rainbow = tuple((k, size + 1 - k) for k in range(1, m.n + 1))
    return ClosedMeander(n=size, upper=m.upper + mirrored, lower=rainbow)


def _random_matching(positions: list[int], rng: np.random.Generator) -> list[Arch]:
    if not positions:
        return []
    partner = 2 * int(rng.integers(0, len(positions) // 2)) + 1
    return ([(positions[0], positions[partner])]
            + _random_matching(positions[1:partner], rng)
            + _random_matching(positions[partner + 1:], rng))


def random_closed_meander(n: int, rng: np.random.Generator) -> ClosedMeander:
    """Random (not uniform) closed meander on n vertices."""
    vertices = list(range(1, n + 1))
    return ClosedMeander(n=n, upper=tuple(_random_matching(vertices, rng)),
                         lower=tuple(_random_matching(vertices, rng)))


if __name__ == "__main__":
    # Quick test
    text = sys.argv[1] if len(sys.argv) > 1 else "1,4,3,2,5"
    sigma = parse_permutation(text)
    print(f"sigma = {sigma}")
    print(f"Morse vector: {morse_vector(sigma).indices}")
    print(f"Sturm: {is_sturm(sigma)}")
    if is_meander(sigma):
        om = open_meander_arches(sigma)
        print(f"Upper arches: {om.upper_arches}")
        print(f"Lower arches: {om.lower_arches}")
    for n in (3, 5, 7, 9):
        print(f"S_{n}: {len(enumerate_sturm(n))} Sturm permutations")
