#!/usr/bin/env python3
"""
Kasner chord maps on the unit circle.

Three emanation points sit at distance d from the origin at angles 0, 120
and 240 degrees (corners 1, 2, 3). A Kasner point e^{i theta} inside the
near arc of a corner is sent to the second intersection of the line from
that corner through e^{i theta} with the circle. d = 2 is the general
relativity case (tangency at the Taub points). d < 2 leaves stable arcs
where chains end, and d > 2 makes near arcs overlap, so the map becomes
set-valued and is iterated as an IFS on arc sets.

Regime dictionary for the Horava-Lifshitz parameter v (only the regimes are
used, never a formula d(v)):
    d = 2  <->  v = 1/2   (GR)
    d < 2  <->  1/2 < v < 1  (stable arcs)
    d > 2  <->  0 < v < 1/2  (overlapping arcs)

Corner k grows the curvature variable CORNER_CURVATURE[k] in backward time.

All angles are radians in [0, 2 pi).
"""

import argparse
import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np
import pandas as pd

from config import (
    ARC_MERGE_EPS,
    GR_EMANATION_DISTANCE,
    IFS_MAX_STEPS,
    ITINERARY_COLUMNS,
    MONTE_CARLO_CHUNK,
    TANGENCY_EPS,
)
from errors import EmptyInput, MultiValued, TangencyPoint, UsageError
from workers import run_chunks

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
CORNERS = (1, 2, 3)
CORNER_ANGLES = {1: 0.0, 2: TWO_PI / 3, 3: 2 * TWO_PI / 3}
CORNER_CURVATURE = {1: "N1", 2: "N3", 3: "N2"}
POLICIES = ("error", "lexicographic", "seeded-random")

STABLE_ARC = "stable-arc"
MAX_ITER = "max-iterations"
TAUB_HIT = "taub-hit"


@dataclass(frozen=True)
class EmanationConfig:
    d: float = GR_EMANATION_DISTANCE
    tangency_eps: float = TANGENCY_EPS

    def __post_init__(self):
        if not self.d > 1:
            raise UsageError(f"Emanation distance must exceed 1, got {self.d}")

    @property
    def half_width(self) -> float:
        """Half-width w = arccos(1/d) of every near arc."""
        return float(np.arccos(1.0 / self.d))

    def corner_point(self, corner: int) -> complex:
        return self.d * np.exp(1j * CORNER_ANGLES[corner])


def normalize(theta):
    return np.mod(theta, TWO_PI)


def circular_distance(a, b):
    diff = np.abs(normalize(np.asarray(a) - np.asarray(b)))
    return np.minimum(diff, TWO_PI - diff)


# =============================================================================
# ARC SETS
# =============================================================================

@dataclass(frozen=True)
class ArcSet:
    """
    Finite union of arcs, stored as sorted, merged, non-wrapping
    intervals [lo, hi) inside [0, 2 pi). An arc across angle 0 is stored
    as two pieces. Zero-length (point) arcs are allowed.
    """
    arcs: tuple[tuple[float, float], ...] = ()

    @classmethod
    def from_arcs(cls, arcs, eps: float = ARC_MERGE_EPS) -> "ArcSet":
        """Build from (start, end) pairs read counterclockwise; end may pass 2 pi."""
        pieces = []
        for lo, hi in arcs:
            length = hi - lo
            if length < -eps:
                raise UsageError(f"Arc ({lo}, {hi}) has negative length")
            if length >= TWO_PI - eps:
                return cls.full()
            start = float(normalize(lo))
            stop = start + max(length, 0.0)
            if stop > TWO_PI:
                pieces.append((start, TWO_PI))
                pieces.append((0.0, stop - TWO_PI))
            else:
                pieces.append((start, stop))
        return cls(_merge(pieces, eps))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((0.0, TWO_PI),))

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "ArcSet":
        """Parse degrees "lo:hi,lo:hi" (counterclockwise from lo to hi)."""
        arcs = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                lo, hi = (float(x) for x in part.split(":"))
            except ValueError:
                raise UsageError(f"Arc must look like 'lo:hi' in degrees, got {part!r}")
            length = (hi - lo) % 360.0 if hi != lo + 360.0 else 360.0
            arcs.append((np.radians(lo), np.radians(lo) + np.radians(length)))
        return cls.from_arcs(arcs)

    def __bool__(self) -> bool:
        return bool(self.arcs)

    @property
    def measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.arcs))

    def is_full(self, tol: float = 1e-9) -> bool:
        return self.measure >= TWO_PI - tol

    def contains(self, theta: float) -> bool:
        """Half-open membership lo <= theta < hi; a point arc holds only its own angle."""
        theta = float(normalize(theta))
        return any(lo <= theta < hi or lo == hi == theta for lo, hi in self.arcs)

    def endpoints(self) -> list[float]:
        return [v for arc in self.arcs for v in arc]

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(_merge(list(self.arcs) + list(other.arcs), ARC_MERGE_EPS))

    def intersection(self, other: "ArcSet") -> "ArcSet":
        pieces = []
        for a_lo, a_hi in self.arcs:
            for b_lo, b_hi in other.arcs:
                lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                if lo <= hi:
                    pieces.append((lo, hi))
        return ArcSet(_merge(pieces, 0.0))

    def gaps(self) -> list[tuple[float, float]]:
        """Circular gaps (start, end) with end possibly past 2 pi; empty for the full circle."""
        if not self.arcs:
            return [(0.0, TWO_PI)]
        result = []
        for k, (_, hi) in enumerate(self.arcs):
            nxt = self.arcs[(k + 1) % len(self.arcs)][0]
            if k == len(self.arcs) - 1:
                nxt += TWO_PI
            if nxt - hi > ARC_MERGE_EPS:
                result.append((hi, nxt))
        return result

    def complement(self) -> "ArcSet":
        return ArcSet.from_arcs(self.gaps()) if self.arcs else ArcSet.full()

    def rotate(self, angle: float) -> "ArcSet":
        return ArcSet.from_arcs([(lo + angle, hi + angle) for lo, hi in self.arcs])

    def to_dict(self) -> dict:
        return {
            "arcs_deg": [[float(np.degrees(lo)), float(np.degrees(hi))] for lo, hi in self.arcs],
            "measure_deg": float(np.degrees(self.measure)),
        }


def _merge(pieces, eps: float) -> tuple[tuple[float, float], ...]:
    merged = []
    for lo, hi in sorted(pieces):
        if merged and lo <= merged[-1][1] + eps:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple((float(lo), float(hi)) for lo, hi in merged)


# =============================================================================
# THE MAPS
# =============================================================================

def taub_points() -> np.ndarray:
    """Cube roots of -1: 60, 180 and 300 degrees."""
    return np.array([np.pi / 3, np.pi, 5 * np.pi / 3])


def near_arcs(cfg: EmanationConfig) -> dict[int, ArcSet]:
    w = cfg.half_width
    return {c: ArcSet.from_arcs([(CORNER_ANGLES[c] - w, CORNER_ANGLES[c] + w)]) for c in CORNERS}


def stable_arcs(cfg: EmanationConfig) -> ArcSet:
    """Points in no near arc; empty iff d >= 2."""
    covered = ArcSet.empty()
    for arc in near_arcs(cfg).values():
        covered = covered.union(arc)
    return covered.complement()


def chord_map(theta, corner: int, cfg: EmanationConfig):
    """
    Second intersection of the line through the corner and e^{i theta}.

    With Q the corner and p = e^{i theta}, the line Q + t (p - Q) meets the
    circle at t = 1 and t = (d^2 - 1) / |p - Q|^2. Vectorized over theta.
    """
    Q = cfg.corner_point(corner)
    p = np.exp(1j * np.asarray(theta, dtype=float))
    t2 = (cfg.d ** 2 - 1) / np.abs(p - Q) ** 2
    return normalize(np.angle(Q + t2 * (p - Q)))


def _corner_offsets(theta: float) -> dict[int, float]:
    return {c: float(circular_distance(theta, CORNER_ANGLES[c])) for c in CORNERS}


def kasner_images(theta: float, cfg: EmanationConfig) -> list[tuple[float, int]]:
    """
    All (theta', corner) for corners whose near arc contains theta.

    Raises:
        TangencyPoint: theta is within tangency_eps of a near-arc endpoint
    """
    w = cfg.half_width
    images = []
    for corner, offset in _corner_offsets(theta).items():
        if abs(offset - w) <= cfg.tangency_eps:
            raise TangencyPoint(f"theta={np.degrees(theta):.9g} deg is a tangency point of corner {corner}")
        if offset < w:
            images.append((float(chord_map(theta, corner, cfg)), corner))
    return images


@dataclass
class Itinerary:
    thetas: list[float]
    corners: list[int]                 # corners[k] produced thetas[k + 1]
    flag: str = MAX_ITER

    def __len__(self) -> int:
        return len(self.corners)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({
            "step": range(len(self.thetas)),
            "theta_deg": np.degrees(self.thetas),
            "corner": pd.array([None] + list(self.corners), dtype="Int64"),
        })
        return frame[ITINERARY_COLUMNS]


def iterate(theta0: float, n: int, cfg: EmanationConfig, policy: str = "error",
            seed: int | None = None) -> Itinerary:
    """
    Apply kasner_images n times, resolving multi-image steps by policy.

    Policies:
        error          raise MultiValued at the first overlap
        lexicographic  take the smallest corner index
        seeded-random  pick uniformly with numpy's default_rng(seed)

    The chain is flagged stable-arc when some iterate, the last one included,
    has no image, and taub-hit when a later iterate lands on a tangency point.
    Otherwise the flag is max-iterations.

    Raises:
        UsageError: n < 0 or unknown policy
        TangencyPoint: theta0 itself is a tangency point
        MultiValued: policy is error and some step has two images
    """
    if n < 0:
        raise UsageError(f"n must be nonnegative, got {n}")
    if policy not in POLICIES:
        raise UsageError(f"Unknown policy {policy!r} (choose from {', '.join(POLICIES)})")
    rng = np.random.default_rng(seed)

    theta = float(normalize(theta0))
    kasner_images(theta, cfg)
    it = Itinerary(thetas=[theta], corners=[])
    for _ in range(n):
        try:
            images = kasner_images(theta, cfg)
        except TangencyPoint:
            it.flag = TAUB_HIT
            return it
        if not images:
            it.flag = STABLE_ARC
            return it
        if len(images) > 1:
            if policy == "error":
                raise MultiValued(f"theta={np.degrees(theta):.6g} deg has images via corners "
                                  f"{[c for _, c in images]}")
            if policy == "seeded-random":
                theta, corner = images[int(rng.integers(len(images)))]
            else:
                theta, corner = images[0]
        else:
            theta, corner = images[0]
        it.thetas.append(theta)
        it.corners.append(corner)
    try:
        if not kasner_images(theta, cfg):
            it.flag = STABLE_ARC
    except TangencyPoint:
        it.flag = TAUB_HIT
    return it


def eras(it: Itinerary) -> list[tuple[int, int, tuple[int, ...]]]:
    """
    Split the corner sequence into eras: greedy maximal runs in which every
    corner repeats the one two steps earlier, so the run alternates between
    (at most) two corners.

    Returns:
        List of (start index, length, sorted corner pair)
    """
    c = it.corners
    result = []
    i = 0
    while i < len(c):
        j = i + 2
        while j < len(c) and c[j] == c[j - 2]:
            j += 1
        j = min(j, len(c))
        result.append((i, j - i, tuple(sorted(set(c[i:j])))))
        i = j
    return result


def era_length_histogram(itineraries) -> dict[int, int]:
    """Era length -> count over many itineraries (last, possibly truncated, era excluded)."""
    counts = Counter()
    for it in itineraries:
        for _, length, _ in eras(it)[:-1]:
            counts[length] += 1
    return dict(sorted(counts.items()))


# =============================================================================
# ITERATED FUNCTION SYSTEM
# =============================================================================

def arc_image(lo: float, hi: float, corner: int, cfg: EmanationConfig) -> tuple[float, float]:
    """
    Image of an arc [lo, hi] inside one near arc, as (start, length).

    The chord map reverses orientation, so the image runs counterclockwise
    from f(hi) to f(lo).
    """
    if hi - lo <= ARC_MERGE_EPS:
        start = float(chord_map(lo, corner, cfg))
        return start, 0.0
    f_lo, f_hi = chord_map(np.array([lo, hi]), corner, cfg)
    return float(f_hi), float(normalize(f_lo - f_hi))


def ifs_step(A: ArcSet, cfg: EmanationConfig) -> ArcSet:
    images = []
    for corner, arc in near_arcs(cfg).items():
        for lo, hi in A.intersection(arc).arcs:
            start, length = arc_image(lo, hi, corner, cfg)
            images.append((start, start + length))
    return ArcSet.from_arcs(images)


def ifs_iterate(A: ArcSet, n: int, cfg: EmanationConfig) -> ArcSet:
    """Image of A under n steps of the union of all corner maps restricted to their near arcs."""
    for _ in range(n):
        A = ifs_step(A, cfg)
    return A


def coverage_steps(A: ArcSet, cfg: EmanationConfig, max_steps: int = IFS_MAX_STEPS) -> int | None:
    """Steps until the IFS image is the full circle, or None within max_steps."""
    for step in range(max_steps + 1):
        if A.is_full():
            return step
        A = ifs_step(A, cfg)
    return None


def hausdorff_distance(A: ArcSet, B: ArcSet) -> float:
    """
    Hausdorff distance in arc length.

    The distance to B over an arc of A peaks at the arc's endpoints or at a
    midpoint of a gap of B, so only those candidates are checked.

    Raises:
        EmptyInput: either set is empty
    """
    if not A or not B:
        raise EmptyInput("Hausdorff distance needs two nonempty arc sets")
    return max(_directed_hausdorff(A, B), _directed_hausdorff(B, A))


def _distance_to(theta: float, B: ArcSet) -> float:
    if B.contains(theta):
        return 0.0
    return float(np.min(circular_distance(theta, np.array(B.endpoints()))))


def _directed_hausdorff(A: ArcSet, B: ArcSet) -> float:
    candidates = A.endpoints()
    for lo, hi in B.gaps():
        mid = float(normalize(0.5 * (lo + hi)))
        if A.contains(mid):
            candidates.append(mid)
    return max(_distance_to(theta, B) for theta in candidates)


# =============================================================================
# MONTE CARLO
# =============================================================================

def _fates(thetas: np.ndarray, max_iter: int, cfg: EmanationConfig) -> np.ndarray:
    """
    Vectorized chains with the lexicographic policy.

    Returns:
        Steps until landing in a stable arc, or -1 (no termination or Taub hit)
    """
    theta = normalize(np.asarray(thetas, dtype=float))
    fate = np.full(theta.shape, -1, dtype=int)
    active = np.ones(theta.shape, dtype=bool)
    w = cfg.half_width

    for step in range(max_iter + 1):
        if not active.any():
            break
        offsets = np.stack([circular_distance(theta, CORNER_ANGLES[c]) for c in CORNERS])
        tangent = np.any(np.abs(offsets - w) <= cfg.tangency_eps, axis=0) & active
        active &= ~tangent
        inside = offsets < w
        landed = active & ~inside.any(axis=0)
        fate[landed] = step
        active &= ~landed
        if step == max_iter:
            break
        new_theta = theta.copy()
        for k in reversed(range(len(CORNERS))):
            move = active & inside[k]
            new_theta[move] = chord_map(theta[move], CORNERS[k], cfg)
        theta = new_theta
    return fate


def _stats_chunk(task) -> int:
    seed_seq, size, max_iter, cfg = task
    rng = np.random.default_rng(seed_seq)
    thetas = rng.uniform(0.0, TWO_PI, size=size)
    return int(np.sum(_fates(thetas, max_iter, cfg) >= 0))


def termination_stats(sample_count: int, max_iter: int, cfg: EmanationConfig, seed: int = 0,
                      jobs: int = 1, chunk: int = MONTE_CARLO_CHUNK,
                      show_progress: bool = False) -> float:
    """
    Fraction of uniform initial angles whose chain ends in a stable arc
    within max_iter steps.

    Samples are drawn in fixed-size chunks with independent spawned seed
    streams, so the result depends on seed only, never on jobs.
    """
    if sample_count <= 0:
        logger.warning("termination_stats called with sample_count=%d; returning 0", sample_count)
        return 0.0
    sizes = [chunk] * (sample_count // chunk)
    if sample_count % chunk:
        sizes.append(sample_count % chunk)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    tasks = [(ss, size, max_iter, cfg) for ss, size in zip(streams, sizes)]
    counts = run_chunks(_stats_chunk, tasks, jobs=jobs, desc="Monte Carlo", show_progress=show_progress)
    return sum(counts) / sample_count


def main():
    parser = argparse.ArgumentParser(description="Iterate the Kasner chord map")
    parser.add_argument("--theta", type=float, default=100.0, help="Initial angle in degrees")
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--d", type=float, default=GR_EMANATION_DISTANCE)
    parser.add_argument("--policy", default="lexicographic", choices=POLICIES)
    args = parser.parse_args()

    cfg = EmanationConfig(args.d)
    it = iterate(np.radians(args.theta), args.n, cfg, args.policy)
    print(f"\n{'='*60}")
    print(f"KASNER MAP d={cfg.d:g}")
    print(f"{'='*60}")
    print(it.to_frame().to_string(index=False))
    print(f"Flag: {it.flag}")
    print(f"Stable arcs: {stable_arcs(cfg).to_dict()}")


if __name__ == "__main__":
    main()
