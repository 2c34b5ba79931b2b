"""
Configuration constants for the Sturm/Kasner toolkit.

Every numeric knob has a module-level default here. Environment variables
prefixed with STURMKIT_ (or a .env file) override them at import time, and
a key=value settings file can override them again per CLI run.
"""
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from dotenv import dotenv_values, load_dotenv

from errors import UsageError

# Load .env variables globally
load_dotenv()

ENV_PREFIX = "STURMKIT_"


def _env(name: str, default, cast=float):
    raw = os.environ.get(ENV_PREFIX + name)
    return default if raw is None else cast(raw)


# Meander enumeration
ENUMERATION_BOUND = _env("ENUMERATION_BOUND", 13, int)   # brute-force limit on n

# Shooting (equilibrium BVP)
SHOOTING_GRID = _env("SHOOTING_GRID", 2048, int)
SHOOTING_TOL = _env("SHOOTING_TOL", 1e-10)
BISECTION_HALVINGS = _env("BISECTION_HALVINGS", 60, int)
HYPERBOLICITY_THRESHOLD = _env("HYPERBOLICITY_THRESHOLD", 1e-8)
ESCAPE_BOUND = _env("ESCAPE_BOUND", 1e6)
TIE_RESOLUTION = _env("TIE_RESOLUTION", 1e-9)

# Bianchi integration
BIANCHI_RTOL = _env("BIANCHI_RTOL", 1e-10)
BIANCHI_ATOL = _env("BIANCHI_ATOL", 1e-12)
BIANCHI_MAX_STEP = _env("BIANCHI_MAX_STEP", 0.1)
DEFAULT_GAMMA = _env("DEFAULT_GAMMA", 4.0 / 3.0)
KASNER_PLATEAU_THRESHOLD = _env("KASNER_PLATEAU_THRESHOLD", 1e-3)

# Kasner / HL maps
GR_EMANATION_DISTANCE = 2.0
TANGENCY_EPS = _env("TANGENCY_EPS", 1e-12)
ARC_MERGE_EPS = _env("ARC_MERGE_EPS", 1e-12)
MONTE_CARLO_CHUNK = _env("MONTE_CARLO_CHUNK", 1000, int)
IFS_MAX_STEPS = _env("IFS_MAX_STEPS", 200, int)

# Processing Configuration
PARALLEL_WORKERS = _env("PARALLEL_WORKERS", 1, int)   # 1 = run inline, no process pool

# Rendering
SVG_WIDTH = _env("SVG_WIDTH", 640, int)
SVG_HEIGHT = _env("SVG_HEIGHT", 400, int)
SVG_PRECISION = _env("SVG_PRECISION", 4, int)

# Output schema of the trajectory CSV
TRAJECTORY_COLUMNS = [
    "t", "N1", "N2", "N3", "Sp", "Sm",
    "Omega", "q",
    "I_partial", "J_partial",
]

# Output schema of the shooting scan CSV
SHOOTING_COLUMNS = ["a", "v1", "w1", "escaped"]

# Output schema of the Kasner itinerary CSV
ITINERARY_COLUMNS = ["step", "theta_deg", "corner"]


@dataclass(frozen=True)
class Settings:
    """Run-time view of the defaults above, overridable from a key=value file."""
    enumeration_bound: int = ENUMERATION_BOUND
    shooting_grid: int = SHOOTING_GRID
    shooting_tol: float = SHOOTING_TOL
    bisection_halvings: int = BISECTION_HALVINGS
    hyperbolicity_threshold: float = HYPERBOLICITY_THRESHOLD
    escape_bound: float = ESCAPE_BOUND
    tie_resolution: float = TIE_RESOLUTION
    bianchi_rtol: float = BIANCHI_RTOL
    bianchi_atol: float = BIANCHI_ATOL
    bianchi_max_step: float = BIANCHI_MAX_STEP
    default_gamma: float = DEFAULT_GAMMA
    tangency_eps: float = TANGENCY_EPS
    monte_carlo_chunk: int = MONTE_CARLO_CHUNK
    ifs_max_steps: int = IFS_MAX_STEPS
    parallel_workers: int = PARALLEL_WORKERS
    svg_width: int = SVG_WIDTH
    svg_height: int = SVG_HEIGHT


def load_settings(path: str | Path | None = None) -> Settings:
    """
    Build Settings from the defaults, overridden by a key=value file.

    Keys are matched case-insensitively against the Settings field names,
    with or without the STURMKIT_ prefix.

    Raises:
        UsageError: the file is missing, a key is unknown or a value does not parse
    """
    settings = Settings()
    if path is None:
        return settings

    path = Path(path)
    if not path.exists():
        raise UsageError(f"Config file not found: {path}")

    types = {f.name: f.type for f in fields(Settings)}
    overrides = {}
    for key, raw in dotenv_values(path).items():
        name = key.lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        if name not in types:
            raise UsageError(f"Unknown config key '{key}' in {path}")
        cast = int if types[name] in (int, "int") else float
        try:
            overrides[name] = cast(raw)
        except (TypeError, ValueError):
            raise UsageError(f"Config key '{key}' expects {cast.__name__}, got {raw!r}")
    return replace(settings, **overrides)
