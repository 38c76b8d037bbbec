"""
Tolerances and process-wide settings for polycontain.

Constants are the defaults; ``Settings`` is what the solvers and encoders
actually read through ``get_settings()``.
"""

import contextlib
import dataclasses
import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from polycontain.errors import InvalidInputError

_log = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-7
PIVOT_TOL = 1e-9
MEMBERSHIP_SLACK = 1e-7
CERTIFICATE_TOL = 1e-6
RANK_TOL_FACTOR = 1e-9
NODE_LIMIT = 100000
MAX_PIVOTS = 50000
STALLED_PIVOTS_BEFORE_LEXICOGRAPHIC = 50
VERTEX_CAP = 20
DEFAULT_SEED = 20190101
SOLVERS = ("simplex", "highs")

SEED_ENV = "POLYCONTAIN_SEED"
SOLVER_ENV = "POLYCONTAIN_SOLVER"


@dataclass
class Settings:
    """Tolerances, limits and defaults shared by every module"""
    feasibility_tol: float = FEASIBILITY_TOL
    pivot_tol: float = PIVOT_TOL
    membership_slack: float = MEMBERSHIP_SLACK
    certificate_tol: float = CERTIFICATE_TOL
    rank_tol_factor: float = RANK_TOL_FACTOR
    node_limit: int = NODE_LIMIT
    max_pivots: int = MAX_PIVOTS
    stalled_pivots_before_lexicographic: int = STALLED_PIVOTS_BEFORE_LEXICOGRAPHIC
    vertex_cap: int = VERTEX_CAP
    seed: int = DEFAULT_SEED
    solver: str = "simplex"
    debug_checks: bool = False

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.pivot_tol <= 0:
            raise InvalidInputError("tolerances must be positive")
        if self.solver not in SOLVERS:
            raise InvalidInputError(f"unknown solver {self.solver!r}; expected one of {SOLVERS}")

    def replace(self, **changes) -> "Settings":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_env(cls, environ: Optional[Dict[str, str]] = None) -> "Settings":
        """Defaults with POLYCONTAIN_SEED / POLYCONTAIN_SOLVER applied"""
        environ = os.environ if environ is None else environ
        changes = {}
        if environ.get(SEED_ENV):
            try:
                changes["seed"] = int(environ[SEED_ENV])
            except ValueError as err:
                raise InvalidInputError(f"{SEED_ENV} must be an integer, got {environ[SEED_ENV]!r}") from err
        if environ.get(SOLVER_ENV):
            changes["solver"] = environ[SOLVER_ENV]
        return cls(**changes)

    def save(self, filepath: str):
        """Save settings as JSON"""
        with open(filepath, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, filepath: str) -> "Settings":
        """Load settings from JSON; a missing file gives the defaults"""
        try:
            with open(filepath, "r") as f:
                data = json.load(f)
        except FileNotFoundError:
            _log.info("no settings file at %s, using defaults", filepath)
            return cls()
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown settings keys: {sorted(unknown)}")
        return cls(**data)


_current = Settings.from_env()


def get_settings() -> Settings:
    return _current


def set_settings(settings: Settings) -> Settings:
    """Install new settings; returns the previous ones"""
    global _current
    previous, _current = _current, settings
    return previous


@contextlib.contextmanager
def override_settings(**changes):
    """Temporarily replace some settings fields"""
    previous = set_settings(_current.replace(**changes))
    try:
        yield _current
    finally:
        set_settings(previous)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """PCG64 generator; the settings seed when none is given"""
    return np.random.Generator(np.random.PCG64(_current.seed if seed is None else seed))
