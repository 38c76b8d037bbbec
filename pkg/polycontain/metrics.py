"""
Hausdorff distance bounds between polytopes.

Upper bounds come from containment: X1 ⊆ X2 ⊕ D·ball is encoded with the
ball as an extra Minkowski term whose right-hand side scales with D, and D is
minimized. Lower bounds compare support functions along sampled directions.
The default ball is the unit box (infinity norm).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from polycontain import containment
from polycontain.config import get_settings, make_rng
from polycontain.errors import DimensionMismatchError, InvalidInputError, SolverError
from polycontain.geometry import AHPolytope, HPolytope, Set, Zonotope, support, unit_box
from polycontain.optimize import MINIMIZE, OPTIMAL, LinearModel, ScalarVar, solve

_log = logging.getLogger(__name__)


@dataclass
class HausdorffResult:
    d12_upper: float
    d21_upper: float
    d_upper: float
    ball: HPolytope
    d_lower: Optional[float] = None

    def to_dict(self) -> dict:
        return {"d12": self.d12_upper, "d21": self.d21_upper, "d_upper": self.d_upper, "d_lower": self.d_lower}


def _ball_for(X1: Set, X2: Set, ball: Optional[HPolytope]) -> HPolytope:
    if X1.dim != X2.dim:
        raise DimensionMismatchError("X1", X1.dim, "X2", X2.dim, "Hausdorff distance")
    if ball is None:
        return unit_box(X1.dim)
    if not isinstance(ball, HPolytope):
        raise InvalidInputError(f"ball must be an HPolytope, got {type(ball).__name__}")
    if ball.dim != X1.dim:
        raise DimensionMismatchError("ball", ball.dim, "X1", X1.dim, "Hausdorff distance")
    if np.any(ball.h <= 0):
        raise InvalidInputError("ball must contain the origin in its interior")
    return ball


def _ball_part(ball: HPolytope) -> AHPolytope:
    return AHPolytope(np.zeros(ball.dim), np.eye(ball.dim), ball)


def _encode_directed(model: LinearModel, X1: Set, X2: Set, ball: HPolytope, D: ScalarVar):
    return containment.encode_sum_circumbody(model, X1, [X2, _ball_part(ball)], rhs_scales=[None, D])


def _minimize(model: LinearModel, D: ScalarVar) -> float:
    model.set_objective(D, MINIMIZE)
    sol = solve(model)
    if sol.status != OPTIMAL:
        raise SolverError(f"{model.name}: expected a finite optimum, got {sol.status}")
    _log.debug("%s: D=%.9g after %d pivots", model.name, sol.value(D), sol.pivots)
    return sol.value(D)


def directed_upper(X1: Set, X2: Set, ball: Optional[HPolytope] = None) -> float:
    """Smallest D for which X1 ⊆ X2 ⊕ D·ball is certified"""
    ball = _ball_for(X1, X2, ball)
    model = LinearModel("hausdorff/directed")
    D = model.add_scalar_var(nonneg=True, name="D")
    _encode_directed(model, X1, X2, ball, D)
    return _minimize(model, D)


def hausdorff_upper(X1: Set, X2: Set, ball: Optional[HPolytope] = None) -> HausdorffResult:
    """
    Both directed bounds plus the joint bound from one LP with a shared D.

    d12 covers X2 by an inflated X1 (sup over X2 of the distance to X1), d21
    covers X1 by an inflated X2.
    """
    ball = _ball_for(X1, X2, ball)
    d12 = directed_upper(X2, X1, ball)
    d21 = directed_upper(X1, X2, ball)
    model = LinearModel("hausdorff/joint")
    D = model.add_scalar_var(nonneg=True, name="D")
    _encode_directed(model, X1, X2, ball, D)
    _encode_directed(model, X2, X1, ball, D)
    joint = _minimize(model, D)
    if abs(joint - max(d12, d21)) > get_settings().certificate_tol:
        _log.warning("joint Hausdorff bound %.9g differs from max(%.9g, %.9g)", joint, d12, d21)
    return HausdorffResult(d12, d21, joint, ball)


def zonotope_directed_upper(Z1: Zonotope, Z2: Zonotope) -> Tuple[float, np.ndarray]:
    """Smallest D with Z1 inside Z2 ⊕ D·box, and the generator witness Gamma"""
    # Z1 ⊆ Z2 ⊕ D·box: generators (Y, D I) with Delta = D Gamma_2
    model = LinearModel("hausdorff/zonotope")
    D = model.add_scalar_var(nonneg=True, name="D")
    n = Z1.dim
    Gam = model.add_signed_var(Z2.num_generators, Z1.num_generators, name="Gamma")
    beta = model.add_signed_var(Z2.num_generators, 1, name="beta")
    Delta = model.add_signed_var(n, Z1.num_generators, name="Delta")
    b = model.add_signed_var(n, 1, name="b")
    model.add_matrix_equality(Z2.generator @ Gam.expr + Delta.expr, Z1.generator, name="X=YGamma+Delta")
    model.add_matrix_equality(Z2.generator @ beta.expr + b.expr, (Z2.center - Z1.center).reshape(-1, 1),
                              name="yc-xc=Ybeta+b")
    model.add_inf_norm_bound([Gam, beta], 1.0, name="|Gamma,beta|<=1")
    model.add_inf_norm_bound([Delta, b], D, name="|Delta,b|<=D")
    model.set_objective(D, MINIMIZE)
    sol = solve(model)
    if sol.status != OPTIMAL:
        raise SolverError(f"{model.name}: expected a finite optimum, got {sol.status}")
    return sol.value(D), np.asarray(sol.value(Gam))


def zonotope_hausdorff_upper(Z1: Zonotope, Z2: Zonotope) -> HausdorffResult:
    """Infinity-norm bounds specialized to zonotope generators, directed as in hausdorff_upper"""
    if not (isinstance(Z1, Zonotope) and isinstance(Z2, Zonotope)):
        raise InvalidInputError("zonotope_hausdorff_upper needs two zonotopes")
    ball = _ball_for(Z1, Z2, None)
    d12, _ = zonotope_directed_upper(Z2, Z1)
    d21, _ = zonotope_directed_upper(Z1, Z2)
    return HausdorffResult(d12, d21, max(d12, d21), ball)


def support_gap(X1: Set, X2: Set, c, ball: Optional[HPolytope] = None) -> float:
    """|h_1(c) - h_2(c)| / h_ball(c), a lower bound on the ball-norm Hausdorff distance"""
    ball = _ball_for(X1, X2, ball)
    c = np.asarray(c, dtype=float)
    scale = _ball_support(ball, c)
    if scale <= 0:
        raise InvalidInputError(f"direction {c} has nonpositive ball support")
    return abs(support(X1, c)[0] - support(X2, c)[0]) / scale


def _ball_support(ball: HPolytope, c: np.ndarray) -> float:
    if ball.num_rows == 2 * ball.dim and np.allclose(ball.H, unit_box(ball.dim).H) and np.allclose(ball.h, 1.0):
        return float(np.abs(c).sum())
    return support(ball, c)[0]


def sample_box_boundary(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Directions uniform over the 2n facets of the unit box, then uniform within the facet"""
    C = rng.uniform(-1.0, 1.0, size=(count, n))
    facets = rng.integers(0, 2 * n, size=count)
    C[np.arange(count), facets // 2] = np.where(facets % 2 == 0, 1.0, -1.0)
    return C


def hausdorff_lower_sampling(X1: Set, X2: Set, directions: int = 1000, seed: Optional[int] = None,
                             ball: Optional[HPolytope] = None) -> float:
    """Largest support gap over sampled directions (deterministic for a seed)"""
    if directions < 1:
        raise InvalidInputError(f"need at least one direction, got {directions}")
    ball = _ball_for(X1, X2, ball)
    rng = make_rng(seed)
    best = 0.0
    for c in sample_box_boundary(rng, X1.dim, directions):
        best = max(best, support_gap(X1, X2, c, ball))
    return best


def hausdorff_bounds(X1: Set, X2: Set, directions: int = 1000, seed: Optional[int] = None,
                     ball: Optional[HPolytope] = None) -> HausdorffResult:
    """Upper bounds (zonotope fast path when both are zonotopes and the ball is the box) plus the sampled lower bound"""
    if ball is None and isinstance(X1, Zonotope) and isinstance(X2, Zonotope):
        result = zonotope_hausdorff_upper(X1, X2)
    else:
        result = hausdorff_upper(X1, X2, ball)
    result.d_lower = hausdorff_lower_sampling(X1, X2, directions, seed, result.ball)
    if result.d_lower > result.d_upper + get_settings().certificate_tol:
        _log.warning("sampled lower bound %.9g exceeds upper bound %.9g", result.d_lower, result.d_upper)
    return result
