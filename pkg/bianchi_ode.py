#!/usr/bin/env python3
"""
Wainwright-Hsu equations for class A Bianchi cosmologies.

State (N1, N2, N3, Sp, Sm); everything else (S+, S-, q, K, Omega) is derived
on the fly, so the constraint cannot drift separately from the state. The
big-bang singularity lies at t -> -infinity, so Mixmaster runs integrate
backward.

Usage:
    python bianchi_ode.py --state 0.1,0.2,0.15,-1.016,0.1 --tspan 50
"""

import argparse
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid, solve_ivp

from config import (
    BIANCHI_ATOL,
    BIANCHI_MAX_STEP,
    BIANCHI_RTOL,
    DEFAULT_GAMMA,
    KASNER_PLATEAU_THRESHOLD,
    TRAJECTORY_COLUMNS,
)
from errors import Nonfinite, StepSizeUnderflow, UsageError
from workers import run_chunks

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)
BLOWUP_BOUND = 1e8


# =============================================================================
# STATE
# =============================================================================

@dataclass(frozen=True)
class BianchiState:
    N1: float
    N2: float
    N3: float
    Sp: float
    Sm: float

    def as_array(self) -> np.ndarray:
        return np.array([self.N1, self.N2, self.N3, self.Sp, self.Sm], dtype=float)

    @classmethod
    def from_array(cls, y) -> "BianchiState":
        return cls(*(float(v) for v in y))

    @classmethod
    def parse(cls, text: str) -> "BianchiState":
        """Parse "N1,N2,N3,Sp,Sm"."""
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError:
            raise UsageError(f"State must be five comma-separated numbers: {text!r}")
        if len(values) != 5:
            raise UsageError(f"State needs 5 components (N1,N2,N3,Sp,Sm), got {len(values)}")
        if not np.all(np.isfinite(values)):
            raise UsageError(f"State components must be finite: {text!r}")
        return cls(*values)


@dataclass(frozen=True)
class DerivedQuantities:
    S_plus: float
    S_minus: float
    q: float
    K: float
    Omega: float


@dataclass(frozen=True)
class FluidParameter:
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not 0 <= self.gamma < 2:
            raise UsageError(f"gamma must lie in [0, 2), got {self.gamma}")


def _derived_arrays(y: np.ndarray, gamma: float):
    """S+, S-, q, K, Omega for a state array of shape (5,) or (5, m)."""
    N1, N2, N3, Sp, Sm = y
    S_plus = 0.5 * ((N2 - N3) ** 2 - N1 * (2 * N1 - N2 - N3))
    S_minus = 0.5 * SQRT3 * (N3 - N2) * (N1 - N2 - N3)
    K = 0.75 * (N1 ** 2 + N2 ** 2 + N3 ** 2 - 2 * (N1 * N2 + N2 * N3 + N3 * N1))
    Omega = 1 - Sp ** 2 - Sm ** 2 - K
    q = 2 * (Sp ** 2 + Sm ** 2) + 0.5 * (3 * gamma - 2) * Omega
    return S_plus, S_minus, q, K, Omega


def derived(s: BianchiState, gamma: float = DEFAULT_GAMMA) -> DerivedQuantities:
    return DerivedQuantities(*(float(v) for v in _derived_arrays(s.as_array(), gamma)))


def _rhs_array(t, y, gamma):
    N1, N2, N3, Sp, Sm = y
    S_plus, S_minus, q, _, _ = _derived_arrays(y, gamma)
    return np.array([
        (q - 4 * Sp) * N1,
        (q + 2 * Sp + 2 * SQRT3 * Sm) * N2,
        (q + 2 * Sp - 2 * SQRT3 * Sm) * N3,
        (q - 2) * Sp - 3 * S_plus,
        (q - 2) * Sm - 3 * S_minus,
    ])


def rhs(s: BianchiState, gamma: float = DEFAULT_GAMMA) -> np.ndarray:
    """(N1', N2', N3', Sp', Sm')."""
    return _rhs_array(0.0, s.as_array(), gamma)


# =============================================================================
# SPECIAL STATES AND SETS
# =============================================================================

def kasner_state(theta: float) -> BianchiState:
    return BianchiState(0.0, 0.0, 0.0, float(np.cos(theta)), float(np.sin(theta)))


def taub_line_state(n: float) -> BianchiState:
    return BianchiState(0.0, n, n, -1.0, 0.0)


def vacuum_state(N, Sm: float, sp_sign: float = -1.0) -> BianchiState:
    """
    State with the given N and Sigma_- on the vacuum boundary Omega = 0.

    Raises:
        UsageError: no real Sigma_+ solves Omega = 0
    """
    N1, N2, N3 = (float(v) for v in N)
    K = 0.75 * (N1 ** 2 + N2 ** 2 + N3 ** 2 - 2 * (N1 * N2 + N2 * N3 + N3 * N1))
    sp_sq = 1 - Sm ** 2 - K
    if sp_sq < 0:
        raise UsageError(f"No vacuum state with N={N}, Sm={Sm} (Sp^2 = {sp_sq:.4g})")
    return BianchiState(N1, N2, N3, float(np.copysign(np.sqrt(sp_sq), sp_sign)), float(Sm))


def in_cap(s: BianchiState, k: int, tol: float = 1e-9) -> bool:
    """
    Membership in the closure of the k-th Kasner cap, taken as
    {Omega = 0, N_(k-1) = N_(k+1) = 0}.
    """
    if k not in (1, 2, 3):
        raise UsageError(f"Cap index must be 1, 2 or 3, got {k}")
    N = (s.N1, s.N2, s.N3)
    others = [N[j] for j in range(3) if j != k - 1]
    return all(abs(v) <= tol for v in others) and abs(derived(s).Omega) <= tol


def classify_type(s: BianchiState) -> str:
    """Bianchi class A type from the sign pattern of (N1, N2, N3)."""
    signs = [int(np.sign(v)) for v in (s.N1, s.N2, s.N3)]
    nonzero = [v for v in signs if v != 0]
    if len(nonzero) == 0:
        return "I"
    if len(nonzero) == 1:
        return "II"
    if len(nonzero) == 2:
        return "VII0" if nonzero[0] == nonzero[1] else "VI0"
    return "IX" if len(set(nonzero)) == 1 else "VIII"


def kasner_angle(s: BianchiState) -> tuple[float, float]:
    """Angle atan2(Sm, Sp) in [0, 2 pi) and distance |r - 1| + |N| to the Kasner circle."""
    theta = float(np.mod(np.arctan2(s.Sm, s.Sp), 2 * np.pi))
    distance = abs(np.hypot(s.Sp, s.Sm) - 1.0) + float(np.linalg.norm([s.N1, s.N2, s.N3]))
    return theta, distance


# =============================================================================
# INTEGRATION
# =============================================================================

@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = BIANCHI_RTOL
    atol: float = BIANCHI_ATOL
    max_step: float = BIANCHI_MAX_STEP
    method: str = "RK45"

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0 or self.max_step <= 0:
            raise UsageError(f"Integrator tolerances must be positive: {self}")

    @classmethod
    def from_json(cls, path: str | Path) -> "IntegratorConfig":
        path = Path(path)
        if not path.exists():
            raise UsageError(f"Integrator config not found: {path}")
        with open(path, "r") as f:
            data = json.load(f)
        unknown = set(data) - set(asdict(cls()))
        if unknown:
            raise UsageError(f"Unknown integrator keys: {sorted(unknown)}")
        return cls(**data)

    def halved(self) -> "IntegratorConfig":
        return IntegratorConfig(self.rtol / 2, self.atol / 2, self.max_step, self.method)


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray                       # shape (5, m)
    gamma: float
    direction: str
    nfev: int = 0
    message: str = ""

    def __len__(self) -> int:
        return len(self.t)

    def state(self, k: int) -> BianchiState:
        return BianchiState.from_array(self.y[:, k])

    @property
    def samples(self):
        """(t, BianchiState, DerivedQuantities) per accepted step."""
        for k in range(len(self.t)):
            s = self.state(k)
            yield float(self.t[k]), s, derived(s, self.gamma)

    def derived_arrays(self) -> dict:
        S_plus, S_minus, q, K, Omega = _derived_arrays(self.y, self.gamma)
        return {"S_plus": S_plus, "S_minus": S_minus, "q": q, "K": K, "Omega": Omega}

    def to_frame(self) -> pd.DataFrame:
        d = self.derived_arrays()
        I, J = mixmaster_integrals(self)
        frame = pd.DataFrame({
            "t": self.t,
            "N1": self.y[0], "N2": self.y[1], "N3": self.y[2],
            "Sp": self.y[3], "Sm": self.y[4],
            "Omega": d["Omega"], "q": d["q"],
            "I_partial": I, "J_partial": J,
        })
        return frame[TRAJECTORY_COLUMNS]


def _blowup_event(t, y, gamma):
    return BLOWUP_BOUND - np.max(np.abs(y))


_blowup_event.terminal = True


def integrate(s0: BianchiState, gamma: float = DEFAULT_GAMMA, direction: str = "backward",
              t_span: float = 50.0, cfg: IntegratorConfig | None = None) -> Trajectory:
    """
    Integrate from t = 0 to t = -t_span (backward) or +t_span (forward).

    Samples are the integrator's accepted steps.

    Raises:
        UsageError: bad direction or t_span <= 0
        StepSizeUnderflow: the step size collapsed
        Nonfinite: the state blew up or became NaN/inf
    """
    cfg = cfg or IntegratorConfig()
    if direction not in ("forward", "backward"):
        raise UsageError(f"direction must be forward or backward, got {direction!r}")
    if t_span <= 0:
        raise UsageError(f"t_span must be positive, got {t_span}")
    FluidParameter(gamma)

    t_end = t_span if direction == "forward" else -t_span
    sol = solve_ivp(_rhs_array, (0.0, t_end), s0.as_array(), method=cfg.method,
                    rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
                    args=(gamma,), events=_blowup_event)

    if sol.status == 1:
        raise Nonfinite(f"State exceeded {BLOWUP_BOUND:g} at t={sol.t_events[0][0]:.4g}")
    if sol.status == -1:
        if "step size" in sol.message.lower():
            raise StepSizeUnderflow(f"Step size underflow near t={sol.t[-1]:.6g}: {sol.message}")
        raise Nonfinite(f"Integration failed near t={sol.t[-1]:.6g}: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise Nonfinite("Trajectory contains non-finite values")

    logger.debug("integrated %s over %g: %d steps, %d rhs calls", direction, t_span, len(sol.t), sol.nfev)
    return Trajectory(t=sol.t, y=sol.y, gamma=gamma, direction=direction,
                      nfev=int(sol.nfev), message=sol.message)


def _integrate_task(task) -> Trajectory:
    s0, gamma, direction, t_span, cfg = task
    return integrate(s0, gamma, direction, t_span, cfg)


def ensemble(states, gamma: float = DEFAULT_GAMMA, direction: str = "backward",
             t_span: float = 50.0, cfg: IntegratorConfig | None = None,
             jobs: int = 1, show_progress: bool = False) -> list[Trajectory]:
    """Integrate many initial states; results come back in input order."""
    tasks = [(s, gamma, direction, t_span, cfg or IntegratorConfig()) for s in states]
    return run_chunks(_integrate_task, tasks, jobs=jobs, desc="Integrating", show_progress=show_progress)


def sign_changes(traj: Trajectory) -> int:
    """Number of (step, N_i) pairs where N_i switches sign between consecutive samples."""
    N = traj.y[:3]
    return int(np.sum(N[:, 1:] * N[:, :-1] < 0))


# =============================================================================
# MIXMASTER INTEGRALS
# =============================================================================

def mixmaster_integrals(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """
    Running trapezoid sums of
        I: sqrt|N1 N2| + sqrt|N2 N3| + sqrt|N3 N1|
        J: |N1 N2| + |N2 N3| + |N3 N1|
    over elapsed time toward the singularity.
    """
    N1, N2, N3 = np.abs(traj.y[:3])
    products = np.vstack([N1 * N2, N2 * N3, N3 * N1])
    elapsed = np.abs(traj.t - traj.t[0])
    if traj.direction != "backward":
        logger.debug("Mixmaster integrals on a forward trajectory")
    I = cumulative_trapezoid(np.sqrt(products).sum(axis=0), elapsed, initial=0.0)
    J = cumulative_trapezoid(products.sum(axis=0), elapsed, initial=0.0)
    return I, J


def kasner_epochs(traj: Trajectory, threshold: float = KASNER_PLATEAU_THRESHOLD) -> list[dict]:
    """
    Near-Kasner plateaus (max |N_i| < threshold) along a trajectory.

    Returns:
        One dict per plateau, in integration order:
            - theta: Kasner angle at the quietest sample (smallest max |N_i|)
            - t: time of that sample
            - start, end: sample index range of the plateau
    """
    size = np.max(np.abs(traj.y[:3]), axis=0)
    quiet = size < threshold
    epochs = []
    k = 0
    while k < len(quiet):
        if not quiet[k]:
            k += 1
            continue
        start = k
        while k < len(quiet) and quiet[k]:
            k += 1
        best = start + int(np.argmin(size[start:k]))
        theta, _ = kasner_angle(traj.state(best))
        epochs.append({"theta": theta, "t": float(traj.t[best]), "start": start, "end": k - 1})
    return epochs


def main():
    parser = argparse.ArgumentParser(description="Integrate the Wainwright-Hsu system")
    parser.add_argument("--state", "-s", required=True, help="N1,N2,N3,Sp,Sm")
    parser.add_argument("--gamma", "-g", type=float, default=DEFAULT_GAMMA)
    parser.add_argument("--tspan", "-t", type=float, default=50.0)
    parser.add_argument("--forward", action="store_true", help="Integrate forward (default backward)")
    args = parser.parse_args()

    s0 = BianchiState.parse(args.state)
    traj = integrate(s0, args.gamma, "forward" if args.forward else "backward", args.tspan)
    I, J = mixmaster_integrals(traj)
    print(f"\n{'='*60}")
    print(f"BIANCHI {classify_type(s0)} RUN")
    print(f"{'='*60}")
    print(f"Steps: {len(traj)}")
    print(f"Final state: {traj.state(-1)}")
    print(f"I = {I[-1]:.6g}, J = {J[-1]:.6g}")
    print(f"Kasner epochs (deg): {[round(np.degrees(e['theta']), 2) for e in kasner_epochs(traj)]}")


if __name__ == "__main__":
    main()
