#!/usr/bin/env python3
"""
Seaweed meanders and Cartesian billiards.

A seaweed composition (alpha | beta) lays proper rainbows of sizes alpha
side by side above the road and rainbows of sizes beta below it. The same
composition cuts a staircase domain out of the k x k grid (k = sum alpha);
45-degree billiard paths in that domain have the same connectivity as the
meander.

Usage:
    python seaweed_billiard.py "2,2|1,3"
"""

import logging
import sys
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from errors import MalformedDomain, SumMismatch, Unsupported, UsageError
from meander_core import ClosedMeander, count_components

logger = logging.getLogger(__name__)

Cell = tuple[int, int]
Point = tuple[float, float]


@dataclass(frozen=True)
class SeaweedComposition:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(int(b) for b in self.beta))
        if not self.alpha or not self.beta:
            raise UsageError("Both rainbow size lists must be nonempty")
        if min(self.alpha + self.beta) < 1:
            raise UsageError(f"Rainbow sizes must be positive: {self}")

    @property
    def half(self) -> int:
        return sum(self.alpha)

    def check_sums(self):
        if sum(self.alpha) != sum(self.beta):
            raise SumMismatch(f"sum(alpha)={sum(self.alpha)} != sum(beta)={sum(self.beta)}")

    def __str__(self) -> str:
        return ",".join(map(str, self.alpha)) + "|" + ",".join(map(str, self.beta))


def parse_composition(text: str) -> SeaweedComposition:
    """
    Parse "2,2|1,3" into a composition. A bare "2,4" is the bi-rainbow
    with a single lower rainbow of the total size.
    """
    def sizes(part: str) -> tuple[int, ...]:
        try:
            return tuple(int(x) for x in part.split(",") if x.strip())
        except ValueError:
            raise UsageError(f"Rainbow sizes must be integers: {text!r}")

    if "|" in text:
        upper, lower = text.split("|", 1)
        return SeaweedComposition(sizes(upper), sizes(lower))
    alpha = sizes(text)
    return SeaweedComposition(alpha, (sum(alpha),))


def _rainbows(sizes: tuple[int, ...]) -> list[tuple[int, int]]:
    arches, offset = [], 0
    for a in sizes:
        arches.extend((offset + k, offset + 2 * a + 1 - k) for k in range(1, a + 1))
        offset += 2 * a
    return arches


def seaweed_meander(sc: SeaweedComposition) -> ClosedMeander:
    """Closed meander on 2*sum(alpha) vertices with proper rainbow blocks on each side."""
    sc.check_sums()
    return ClosedMeander(n=2 * sc.half, upper=tuple(_rainbows(sc.alpha)), lower=tuple(_rainbows(sc.beta)))


def maximal_seaweed(alpha) -> ClosedMeander:
    """alpha | alpha: every arch closes with its mirror, giving n/2 components."""
    return seaweed_meander(SeaweedComposition(tuple(alpha), tuple(alpha)))


def rainbow_decomposition(matching, n: int) -> tuple[int, ...]:
    """
    Recover proper rainbow sizes, left to right, from a matching on 1..n.

    Raises:
        Unsupported: the matching has nested rainbows
    """
    partner = {}
    for a, b in matching:
        partner[a], partner[b] = b, a

    sizes, p = [], 1
    while p <= n:
        q = partner.get(p)
        if q is None or q < p or (q - p + 1) % 2:
            raise Unsupported(f"Matching is not a sequence of proper rainbows at vertex {p}")
        size = (q - p + 1) // 2
        if any(partner.get(p + k) != q - k for k in range(size)):
            raise Unsupported(f"Block starting at {p} is not a proper rainbow")
        sizes.append(size)
        p = q + 1
    return tuple(sizes)


def birainbow_formula(alpha) -> int:
    """
    Component count of the bi-rainbow meander M(alpha | sum alpha).

    Closed forms only exist up to three upper rainbows:
        (a1)         -> a1
        (a1, a2)     -> gcd(a1, a2)
        (a1, a2, a3) -> gcd(a1 + a2, a2 + a3)
    """
    alpha = tuple(alpha)
    if len(alpha) == 1:
        return alpha[0]
    if len(alpha) == 2:
        return gcd(alpha[0], alpha[1])
    if len(alpha) == 3:
        return gcd(alpha[0] + alpha[1], alpha[1] + alpha[2])
    raise Unsupported(f"No closed formula for {len(alpha)} rainbows (only 1 to 3)")


# =============================================================================
# CARTESIAN BILLIARD
# =============================================================================

@dataclass(frozen=True)
class Billiard:
    """
    Union of unit cells (r, c); cell (r, c) covers [c-1, c] x [r-1, r].

    Points are tracked in doubled integer coordinates so edge midpoints are
    exact: (X, Y) = (2x, 2y).
    """
    cells: frozenset[Cell]
    source: str = field(default="", compare=False)

    @cached_property
    def boundary_points(self) -> list[tuple[int, int]]:
        """Midpoints of cell edges with a cell on exactly one side, sorted."""
        points = set()
        for r, c in self.cells:
            if (r, c - 1) not in self.cells:
                points.add((2 * (c - 1), 2 * r - 1))
            if (r, c + 1) not in self.cells:
                points.add((2 * c, 2 * r - 1))
            if (r - 1, c) not in self.cells:
                points.add((2 * c - 1, 2 * (r - 1)))
            if (r + 1, c) not in self.cells:
                points.add((2 * c - 1, 2 * r))
        return sorted(points)

    @property
    def paths(self) -> list[list[Point]]:
        return billiard_trajectories(self)

    def to_dict(self) -> dict:
        return {
            "cells": [list(cell) for cell in sorted(self.cells)],
            "trajectories": [[list(p) for p in path] for path in self.paths],
        }


def _partial_sums(sizes) -> list[int]:
    return [0] + list(np.cumsum(sizes, dtype=int))


def billiard_from_seaweed(sc: SeaweedComposition) -> Billiard:
    """
    Cells (r, c) of the k x k grid with beta_start(c) < r <= alpha_end(c).

    alpha_end(c) is the smallest partial sum of alpha that is >= c and
    beta_start(c) the largest partial sum of beta (counting 0) that is < c.
    """
    sc.check_sums()
    k = sc.half
    alpha_sums = _partial_sums(sc.alpha)
    beta_sums = _partial_sums(sc.beta)

    cells = set()
    for c in range(1, k + 1):
        alpha_end = min(s for s in alpha_sums if s >= c)
        beta_start = max(s for s in beta_sums if s < c)
        cells.update((r, c) for r in range(beta_start + 1, alpha_end + 1))
    return Billiard(frozenset(cells), source=str(sc))


def _trace(b: Billiard, start: tuple[int, int]) -> tuple[list[tuple[int, int]], set]:
    """Follow one flight path from a boundary midpoint until the state repeats."""
    X, Y = start
    if X % 2 == 0:
        x, r = X // 2, (Y + 1) // 2
        dx, dy = (1 if (r, x + 1) in b.cells else -1), 1
    else:
        y, c = Y // 2, (X + 1) // 2
        dx, dy = 1, (1 if (y + 1, c) in b.cells else -1)

    state0 = (X, Y, dx, dy)
    boundary = set(b.boundary_points)
    hit, path = set(), [(X, Y)]
    max_steps = 8 * len(b.cells) + 8

    for _ in range(max_steps):
        crossed = ((Y * 2 + dy) // 4 + 1, (X * 2 + dx) // 4 + 1)
        if crossed not in b.cells:
            raise MalformedDomain(f"Trajectory from {start} left the domain at cell {crossed}")
        X, Y = X + dx, Y + dy
        if X % 2 == 0:
            ahead = ((Y + 1) // 2, X // 2 + 1 if dx > 0 else X // 2)
            if ahead not in b.cells:
                dx = -dx
        else:
            ahead = (Y // 2 + 1 if dy > 0 else Y // 2, (X + 1) // 2)
            if ahead not in b.cells:
                dy = -dy
        if (X, Y) in boundary:
            hit.add((X, Y))
        if (X, Y, dx, dy) == state0:
            return path, hit
        path.append((X, Y))

    raise MalformedDomain(f"Trajectory from {start} did not close within {max_steps} steps")


def billiard_trajectories(b: Billiard) -> list[list[Point]]:
    """
    All closed flight paths, each as its sequence of edge midpoints.

    Every straight diagonal segment eventually meets a wall, so every path
    passes through at least one boundary midpoint; starting once from each
    unvisited boundary midpoint finds them all.
    """
    if not b.cells:
        raise MalformedDomain("Billiard has no cells")

    visited = set()
    paths = []
    for start in b.boundary_points:
        if start in visited:
            continue
        path, hit = _trace(b, start)
        visited |= hit
        paths.append([(X / 2, Y / 2) for X, Y in path])
    logger.debug("billiard %s: %d trajectories", b.source, len(paths))
    return paths


def billiard_components(b: Billiard) -> int:
    return len(billiard_trajectories(b))


if __name__ == "__main__":
    # Quick test
    sc = parse_composition(sys.argv[1] if len(sys.argv) > 1 else "2,2|1,3")
    m = seaweed_meander(sc)
    print(f"Seaweed {sc}: {m.n} vertices")
    print(f"  meander components:  {count_components(m)}")
    print(f"  billiard components: {billiard_components(billiard_from_seaweed(sc))}")
