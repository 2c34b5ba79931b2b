#!/usr/bin/env python3
"""
Sturm permutation of a nonlinearity by ODE shooting.

Equilibria of u_t = u_xx + f(u) on [0, 1] with Neumann boundaries solve
v'' + f(v) = 0, v'(0) = v'(1) = 0. Shooting from v(0) = a, v'(0) = 0 gives
(v(1), v'(1)) as a function of a; equilibria are the zeros of v'(1; a).
Ordering the equilibria by a (x = 0) and by v(1) (x = 1) gives sigma_f.

Usage:
    python shooting.py --family cubic --param 15
"""

import argparse
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from config import (
    BISECTION_HALVINGS,
    ESCAPE_BOUND,
    HYPERBOLICITY_THRESHOLD,
    SHOOTING_COLUMNS,
    SHOOTING_GRID,
    SHOOTING_TOL,
    TIE_RESOLUTION,
)
from errors import (
    EmptyInput,
    Escaped,
    NonHyperbolicSuspected,
    TieAtBoundary,
    UsageError,
)
from meander_core import Permutation, is_sturm
from workers import run_chunks

logger = logging.getLogger(__name__)


# =============================================================================
# NONLINEARITIES
# =============================================================================

@dataclass(frozen=True)
class Nonlinearity:
    """
    f(v), either a polynomial (coefficients in increasing degree, picklable)
    or an arbitrary callable with an optional derivative.
    """
    description: str
    coefficients: tuple[float, ...] | None = None
    func: Callable[[float], float] | None = field(default=None, compare=False)
    dfunc: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.coefficients is None and self.func is None:
            raise UsageError("Nonlinearity needs coefficients or a callable")

    def __call__(self, v):
        if self.coefficients is not None:
            return P.polyval(v, self.coefficients)
        return self.func(v)

    def derivative(self, v):
        if self.coefficients is not None:
            return P.polyval(v, P.polyder(self.coefficients))
        return None if self.dfunc is None else self.dfunc(v)

    @property
    def has_derivative(self) -> bool:
        return self.coefficients is not None or self.dfunc is not None


def cubic(lam: float) -> Nonlinearity:
    """Chafee-Infante normalization f(v) = lam (v - v^3)."""
    return Nonlinearity(f"cubic({lam:g})", (0.0, lam, 0.0, -lam))


def linear(b: float) -> Nonlinearity:
    """f(v) = b - v."""
    return Nonlinearity(f"linear({b:g})", (b, -1.0))


def constant(c: float) -> Nonlinearity:
    return Nonlinearity(f"constant({c:g})", (c,))


def polynomial(coeffs) -> Nonlinearity:
    coeffs = tuple(float(c) for c in coeffs)
    return Nonlinearity(f"polynomial({','.join(f'{c:g}' for c in coeffs)})", coeffs)


FAMILIES = {
    "cubic": cubic,
    "linear": linear,
    "constant": constant,
}


def make_nonlinearity(family: str, params) -> Nonlinearity:
    """Build a built-in family from CLI-style parameters."""
    if family == "polynomial":
        if not params:
            raise UsageError("polynomial needs at least one coefficient")
        return polynomial(params)
    if family not in FAMILIES:
        raise UsageError(f"Unknown nonlinearity family '{family}' "
                         f"(choose from {', '.join([*FAMILIES, 'polynomial'])})")
    if len(params) != 1:
        raise UsageError(f"{family} takes exactly one parameter")
    return FAMILIES[family](float(params[0]))


# =============================================================================
# SHOOTING
# =============================================================================

@dataclass(frozen=True)
class ShootOutcome:
    a: float
    v1: float
    w1: float


def _escape_event(bound: float):
    def event(x, y):
        return bound - (abs(y[0]) + abs(y[1]))
    event.terminal = True
    event.direction = -1
    return event


def _integrate(f: Nonlinearity, a: float, tol: float, escape_bound: float, sensitivity: bool):
    if sensitivity:
        # (v, w, dv/da, dw/da)
        def rhs(x, y):
            return [y[1], -f(y[0]), y[3], -f.derivative(y[0]) * y[2]]
        y0 = [a, 0.0, 1.0, 0.0]
    else:
        def rhs(x, y):
            return [y[1], -f(y[0])]
        y0 = [a, 0.0]

    sol = solve_ivp(rhs, (0.0, 1.0), y0, method="RK45", rtol=tol, atol=tol,
                    events=_escape_event(escape_bound))
    if sol.status == 1:
        x_esc = float(sol.t_events[0][0])
        raise Escaped(f"Shot a={a:g} escaped |v|+|v'| > {escape_bound:g} at x={x_esc:.4f}", x=x_esc)
    if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
        raise Escaped(f"Shot a={a:g} failed: {sol.message}")
    return sol.y[:, -1]


def shoot(f: Nonlinearity, a: float, tol: float = SHOOTING_TOL,
          escape_bound: float = ESCAPE_BOUND) -> ShootOutcome:
    """
    Integrate v'' + f(v) = 0, v(0)=a, v'(0)=0 over [0, 1].

    Raises:
        UsageError: tol is not positive
        Escaped: |v| + |v'| exceeds escape_bound before x = 1
    """
    if tol <= 0:
        raise UsageError(f"tol must be positive, got {tol}")
    y1 = _integrate(f, a, tol, escape_bound, sensitivity=False)
    return ShootOutcome(a=float(a), v1=float(y1[0]), w1=float(y1[1]))


def transversality(f: Nonlinearity, a: float, tol: float = SHOOTING_TOL,
                   escape_bound: float = ESCAPE_BOUND) -> float:
    """d v'(1) / d a, from the variational equation when f' is known, else central differences."""
    if f.has_derivative:
        return float(_integrate(f, a, tol, escape_bound, sensitivity=True)[3])
    h = 1e-6 * max(1.0, abs(a))
    return (shoot(f, a + h, tol, escape_bound).w1 - shoot(f, a - h, tol, escape_bound).w1) / (2 * h)


def _scan_chunk(task) -> list[tuple[float, float, float, bool]]:
    f, grid, tol, escape_bound = task
    rows = []
    for a in grid:
        try:
            out = shoot(f, a, tol, escape_bound)
            rows.append((out.a, out.v1, out.w1, False))
        except Escaped:
            rows.append((float(a), np.nan, np.nan, True))
    return rows


def scan_shots(f: Nonlinearity, a_grid, tol: float = SHOOTING_TOL,
               escape_bound: float = ESCAPE_BOUND, jobs: int = 1,
               show_progress: bool = False) -> pd.DataFrame:
    """
    Shoot from every a in a_grid.

    Returns:
        DataFrame with columns a, v1, w1, escaped (v1, w1 NaN for escaped shots)
    """
    a_grid = np.asarray(a_grid, dtype=float)
    n_chunks = max(1, min(len(a_grid), 4 * max(1, jobs)))
    tasks = [(f, chunk, tol, escape_bound) for chunk in np.array_split(a_grid, n_chunks) if len(chunk)]
    chunks = run_chunks(_scan_chunk, tasks, jobs=jobs, desc="Shooting", show_progress=show_progress)
    frame = pd.DataFrame([row for chunk in chunks for row in chunk], columns=SHOOTING_COLUMNS)
    escaped = int(frame["escaped"].sum())
    if escaped:
        logger.warning("%s: %d of %d shots escaped", f.description, escaped, len(frame))
    return frame


def find_equilibria(f: Nonlinearity, window=(-2.0, 2.0), grid: int = SHOOTING_GRID,
                    tol: float = SHOOTING_TOL, halvings: int = BISECTION_HALVINGS,
                    threshold: float = HYPERBOLICITY_THRESHOLD,
                    escape_bound: float = ESCAPE_BOUND, jobs: int = 1) -> list[float]:
    """
    Sorted initial values a* with v'(1; a*) = 0.

    Sign changes of v'(1; a) between neighbouring non-escaped grid points
    are refined with Brent's method; exact zeros on the grid are kept as is.

    Raises:
        UsageError: grid < 2
        NonHyperbolicSuspected: |d v'(1)/d a| < threshold at a root
    """
    if grid < 2:
        raise UsageError(f"grid must be at least 2, got {grid}")
    lo, hi = window
    frame = scan_shots(f, np.linspace(lo, hi, grid), tol, escape_bound, jobs=jobs)
    a = frame["a"].to_numpy()
    w = frame["w1"].to_numpy()
    ok = ~frame["escaped"].to_numpy()
    sign = np.sign(w)

    def w1(x: float) -> float:
        return shoot(f, x, tol, escape_bound).w1

    roots = [float(a[i]) for i in range(grid) if ok[i] and sign[i] == 0]
    for i in range(grid - 1):
        if ok[i] and ok[i + 1] and sign[i] * sign[i + 1] < 0:
            xtol = max((a[i + 1] - a[i]) * 2.0 ** -halvings, 4 * np.finfo(float).eps)
            roots.append(float(brentq(w1, a[i], a[i + 1], xtol=xtol, maxiter=max(100, halvings))))
    roots.sort()

    for r in roots:
        slope = transversality(f, r, tol, escape_bound)
        if abs(slope) < threshold:
            raise NonHyperbolicSuspected(
                f"{f.description}: equilibrium at a={r:.6g} has d v'(1)/da = {slope:.3g}")
    logger.info("%s: %d equilibria in [%g, %g]", f.description, len(roots), lo, hi)
    return roots


def sturm_permutation_numeric(f: Nonlinearity, window=(-2.0, 2.0), grid: int = SHOOTING_GRID,
                              tol: float = SHOOTING_TOL, resolution: float = TIE_RESOLUTION,
                              jobs: int = 1, **kwargs) -> Permutation:
    """
    sigma(j) = rank at x=0 of the equilibrium that is j-th smallest at x=1.

    Raises:
        EmptyInput: no equilibria found in the window
        TieAtBoundary: two equilibria share v(1) within resolution
    """
    roots = find_equilibria(f, window, grid, tol, jobs=jobs, **kwargs)
    if not roots:
        raise EmptyInput(f"{f.description}: no equilibria in {window}")
    return permutation_from_roots(f, roots, tol, resolution)


def permutation_from_roots(f: Nonlinearity, roots, tol: float = SHOOTING_TOL,
                           resolution: float = TIE_RESOLUTION) -> Permutation:
    """Rank the equilibria (sorted by a) by their value v(1)."""
    if not roots:
        raise EmptyInput(f"{f.description}: no equilibria")
    v1 = np.array([shoot(f, r, tol).v1 for r in roots])
    order = np.argsort(v1, kind="stable")
    gaps = np.diff(v1[order])
    if len(gaps) and gaps.min() < resolution:
        raise TieAtBoundary(f"{f.description}: equilibria coincide at x=1 (gap {gaps.min():.3g})")

    sigma = Permutation(tuple(int(k) + 1 for k in order))
    if not is_sturm(sigma):
        logger.warning("%s: numeric permutation %s is not Sturm", f.description, sigma)
    return sigma


def shooting_curve(f: Nonlinearity, a_grid, tol: float = SHOOTING_TOL, jobs: int = 1) -> pd.DataFrame:
    """The image of the Neumann axis at x=1 as (v1, w1) samples; escaped shots are NaN gaps."""
    return scan_shots(f, a_grid, tol, jobs=jobs)


def main():
    parser = argparse.ArgumentParser(description="Sturm permutation of f by shooting")
    parser.add_argument("--family", "-f", default="cubic", help="cubic | linear | constant | polynomial")
    parser.add_argument("--param", "-p", nargs="+", default=["15"], help="Family parameter(s)")
    parser.add_argument("--grid", "-g", type=int, default=SHOOTING_GRID)
    args = parser.parse_args()

    f = make_nonlinearity(args.family, args.param)
    roots = find_equilibria(f, grid=args.grid)
    print(f"\n{'='*60}")
    print(f"SHOOTING: {f.description}")
    print(f"{'='*60}")
    print(f"Equilibria (a): {[round(r, 6) for r in roots]}")
    print(f"sigma_f = {permutation_from_roots(f, roots)}")


if __name__ == "__main__":
    main()
