"""
Approximation by alternating linear programs.

``slp_step`` is the trust-region engine: it solves a linearized subproblem,
re-certifies the candidate with an exact containment LP and halves the
trust region on failure. Its clients are ``reduce_outer`` (Z inside the
reduced zonotope) and ``project_inner`` (an H-polytope inside a projection).
``reduce_inner`` alternates two exact LPs and takes an engine step whenever
the alternation stops making progress.

Every accepted iterate carries an exact certificate; bounds never increase.
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import Any, List, Optional, Protocol, Tuple

import numpy as np

from polycontain import containment, numerics
from polycontain.config import get_settings, make_rng
from polycontain.errors import (InitializationError, InvalidCenterError, InvalidInputError,
                                UnboundedSetError)
from polycontain.geometry import AHPolytope, HPolytope, Zonotope, check_bounded, unit_box
from polycontain.metrics import zonotope_directed_upper
from polycontain.optimize import MINIMIZE, OPTIMAL, LinearModel, solve

_log = logging.getLogger(__name__)

OUTER = "outer"
INNER = "inner"
PROJECTION = "projection"

# certified scalings are nudged this far into the interior
_MARGIN = 1e-9
# bounds at or below this count as exact
_EXACT = 1e-12


@dataclass
class AlternationConfig:
    max_entry_step: float = 0.1
    max_iters: int = 100
    stall_tolerance: float = 1e-4
    stall_window: int = 5
    seed: Optional[int] = None
    min_step: float = 1e-9
    inflation: float = 1.05
    bootstrap_trials: int = 8

    def __post_init__(self):
        if self.max_entry_step <= 0:
            raise InvalidInputError(f"max_entry_step must be positive, got {self.max_entry_step}")
        if self.max_iters < 0 or self.stall_window < 1 or self.min_step <= 0:
            raise InvalidInputError("max_iters >= 0, stall_window >= 1 and min_step > 0 are required")
        if self.inflation < 1.0 or self.bootstrap_trials < 0:
            raise InvalidInputError("inflation >= 1 and bootstrap_trials >= 0 are required")


@dataclass
class AlternationTrace:
    """Accepted iterates (decision matrix, certified bound) in order"""
    kind: str
    iterates: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    converged: bool = False
    center: Optional[np.ndarray] = None

    def record(self, matrix: np.ndarray, bound: float):
        self.iterates.append((np.array(matrix, dtype=float), float(bound)))
        _log.info("%s iteration %d: bound %.9g", self.kind, len(self.iterates) - 1, bound)

    @property
    def bounds(self) -> np.ndarray:
        return np.array([b for _, b in self.iterates])

    @property
    def iterations(self) -> int:
        return max(len(self.iterates) - 1, 0)

    def stalled(self, cfg: AlternationConfig) -> bool:
        b = self.bounds
        if b.size <= cfg.stall_window:
            return False
        old = b[-1 - cfg.stall_window]
        return old - b[-1] <= cfg.stall_tolerance * max(abs(old), 1e-12)

    def to_csv(self, filepath: str):
        with open(filepath, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["iteration", "bound"])
            for k, (_, bound) in enumerate(self.iterates):
                writer.writerow([k, repr(bound)])


@dataclass
class ReducedZonotope:
    zonotope: Zonotope
    bound: float
    mode: str


# ------------------------------------------------------------------ engine

@dataclass
class SLPIterate:
    """A decision matrix, its exact bound and the witness the linearization needs"""
    matrix: np.ndarray
    bound: float
    witness: Any = None


class SLPProblem(Protocol):
    def evaluate(self, matrix: np.ndarray) -> Optional[SLPIterate]:
        """Exact certificate at ``matrix`` (possibly after a scaling repair), or None"""
        ...

    def linearized_step(self, current: SLPIterate, radius: float) -> Optional[np.ndarray]:
        """Candidate matrix from the trust-region LP, or None if it is infeasible"""
        ...


def slp_step(current: SLPIterate, problem: SLPProblem, cfg: AlternationConfig) -> Tuple[SLPIterate, bool]:
    """One accepted step, or ``(current, False)`` once the trust region drops below ``min_step``"""
    radius = cfg.max_entry_step
    while radius >= cfg.min_step:
        candidate = problem.linearized_step(current, radius)
        if candidate is not None:
            nxt = problem.evaluate(candidate)
            if nxt is not None and nxt.bound <= current.bound:
                return nxt, True
        _log.debug("step rejected at radius %.3g", radius)
        radius /= 2.0
    return current, False


def run_slp(problem: SLPProblem, start: SLPIterate, cfg: AlternationConfig,
            trace: AlternationTrace) -> SLPIterate:
    current = start
    trace.record(current.matrix, current.bound)
    for _ in range(cfg.max_iters):
        if current.bound <= _EXACT:
            trace.converged = True
            break
        current, accepted = slp_step(current, problem, cfg)
        if not accepted:
            _log.info("%s: trust region exhausted at bound %.9g", trace.kind, current.bound)
            break
        trace.record(current.matrix, current.bound)
        if trace.stalled(cfg):
            trace.converged = True
            break
    return current


# ------------------------------------------------------------ zonotopes

def _scaling_witness(A: np.ndarray, B: np.ndarray) -> Tuple[float, Optional[np.ndarray]]:
    """Largest l with <0, l A> inside <0, B> by the zonotope encoding, and Gamma with B Gamma = l A"""
    n = A.shape[0]
    lam, cert = containment.max_scaling(Zonotope(np.zeros(n), A), Zonotope(np.zeros(n), B),
                                        method=containment.ZONOTOPE)
    if np.isinf(lam):
        return lam, np.zeros((B.shape[1], A.shape[1]))
    if cert is None or lam <= 0:
        return 0.0, None
    return lam, cert.gammas[0]


class _OuterProblem:
    """Decision matrix X_red with Z ⊆ <c, X_red>; bound: Z_red inside Z ⊕ δ·box"""

    def __init__(self, X: np.ndarray):
        self.X = X

    def evaluate(self, M: np.ndarray) -> Optional[SLPIterate]:
        lam, gamma = _scaling_witness(self.X, M)
        if gamma is None:
            return None
        s = max(1.0, (1.0 + _MARGIN) / lam)
        M = s * M
        witness = gamma / (lam * s) if np.isfinite(lam) else gamma
        n = M.shape[0]
        delta, _ = zonotope_directed_upper(Zonotope(np.zeros(n), M), Zonotope(np.zeros(n), self.X))
        return SLPIterate(M, delta, witness)

    def linearized_step(self, current: SLPIterate, radius: float) -> Optional[np.ndarray]:
        X, M, G0 = self.X, current.matrix, current.witness
        n, k = M.shape
        m = X.shape[1]
        model = LinearModel("reduce/outer-step")
        dX = model.add_matrix_var(n, k, lb=-radius, ub=radius, name="dX")
        Gam0 = model.add_signed_var(k, m, name="Gamma0")
        Gam1 = model.add_signed_var(m, k, name="Gamma1")
        Delta = model.add_signed_var(n, k, name="Delta")
        delta = model.add_scalar_var(nonneg=True, name="delta")
        # (M + dX) Gamma0 linearized around the current witness
        model.add_matrix_equality(dX @ G0 + M @ Gam0.expr, X, name="X=XredGamma0")
        model.add_matrix_equality(X @ Gam1.expr + Delta.expr - dX, M, name="Xred=XGamma1+Delta")
        model.add_inf_norm_bound([Gam0], 1.0, name="|Gamma0|<=1")
        model.add_inf_norm_bound([Gam1], 1.0, name="|Gamma1|<=1")
        model.add_inf_norm_bound([Delta], delta, name="|Delta|<=delta")
        model.set_objective(delta, MINIMIZE)
        sol = solve(model)
        if sol.status != OPTIMAL:
            return None
        return M + sol.value(dX)


def _head_directions(X: np.ndarray, k: int) -> np.ndarray:
    norms = np.linalg.norm(X, axis=0)
    heads = np.argsort(-norms, kind="stable")[:k]
    R = X[:, heads].copy()
    nonzero = norms[heads] > 0
    R[:, nonzero] /= norms[heads][nonzero]
    return R


def _diagonal_fit(X: np.ndarray, R: np.ndarray) -> Optional[np.ndarray]:
    """R diag(d) with X = R M, |M| row sums <= d, minimizing sum(d)"""
    k, m = R.shape[1], X.shape[1]
    model = LinearModel("reduce/bootstrap")
    M = model.add_signed_var(k, m, name="M")
    d = model.add_matrix_var(k, 1, nonneg=True, name="d")
    model.add_matrix_equality(R @ M.expr, X, name="X=RM")
    model.add_inf_norm_bound([M], d, name="|M|<=d")
    model.set_objective(np.ones((1, k)) @ d, MINIMIZE)
    sol = solve(model)
    if sol.status != OPTIMAL:
        return None
    return R * sol.value(d).reshape(-1)


def _bootstrap_outer(problem: _OuterProblem, k: int, cfg: AlternationConfig) -> SLPIterate:
    X = problem.X
    rng = make_rng(cfg.seed)
    directions = [_head_directions(X, k)]
    for _ in range(cfg.bootstrap_trials):
        R = rng.normal(size=(X.shape[0], k))
        directions.append(R / np.linalg.norm(R, axis=0))
    best = None
    for R in directions:
        fitted = _diagonal_fit(X, R)
        if fitted is None:
            continue
        for candidate in (fitted, cfg.inflation * fitted):
            it = problem.evaluate(candidate)
            if it is not None and (best is None or it.bound < best.bound):
                best = it
    if best is None:
        raise InitializationError(f"no outer reduction to {k} generators found a feasible start")
    _log.debug("outer bootstrap: best bound %.9g from %d direction sets", best.bound, len(directions))
    return best


def _check_target(Z: Zonotope, target_cols: int):
    if not 1 <= target_cols <= Z.num_generators:
        raise InvalidInputError(f"target_cols must lie in [1, {Z.num_generators}], got {target_cols}")


def _unchanged(Z: Zonotope, mode: str) -> Tuple[ReducedZonotope, AlternationTrace]:
    trace = AlternationTrace(mode, center=Z.center)
    trace.record(Z.generator, 0.0)
    trace.converged = True
    return ReducedZonotope(Zonotope(Z.center.copy(), Z.generator.copy()), 0.0, mode), trace


def reduce_outer(Z: Zonotope, target_cols: int,
                 cfg: Optional[AlternationConfig] = None) -> Tuple[ReducedZonotope, AlternationTrace]:
    """Fewer generators, containing Z, with a certified Hausdorff bound"""
    cfg = cfg or AlternationConfig()
    _check_target(Z, target_cols)
    if target_cols == Z.num_generators:
        return _unchanged(Z, OUTER)
    problem = _OuterProblem(Z.generator)
    start = _bootstrap_outer(problem, target_cols, cfg)
    trace = AlternationTrace(OUTER, center=Z.center)
    final = run_slp(problem, start, cfg, trace)
    return ReducedZonotope(Zonotope(Z.center, final.matrix), final.bound, OUTER), trace


class _InnerProblem:
    """Decision matrix X_red with <c, X_red> ⊆ Z; bound: Z inside Z_red ⊕ δ·box"""

    def __init__(self, X: np.ndarray):
        self.X = X

    def evaluate(self, M: np.ndarray) -> Optional[SLPIterate]:
        lam, gamma = _scaling_witness(M, self.X)
        if gamma is None:
            return None
        if lam < 1.0:
            M = (lam / (1.0 + _MARGIN)) * M
        n = M.shape[0]
        delta, gamma1 = zonotope_directed_upper(Zonotope(np.zeros(n), self.X), Zonotope(np.zeros(n), M))
        return SLPIterate(M, delta, gamma1)

    def refit(self, current: SLPIterate) -> Optional[np.ndarray]:
        """Best X_red = X Gamma0 with Gamma1 held at the current witness"""
        X, G1 = self.X, current.witness
        n, m = X.shape
        k = current.matrix.shape[1]
        model = LinearModel("reduce/inner-refit")
        Gam0 = model.add_signed_var(m, k, name="Gamma0")
        Delta = model.add_signed_var(n, m, name="Delta")
        delta = model.add_scalar_var(nonneg=True, name="delta")
        model.add_matrix_equality((X @ Gam0.expr) @ G1 + Delta.expr, X, name="X=XGamma0Gamma1+Delta")
        model.add_inf_norm_bound([Gam0], 1.0, name="|Gamma0|<=1")
        model.add_inf_norm_bound([Delta], delta, name="|Delta|<=delta")
        model.set_objective(delta, MINIMIZE)
        sol = solve(model)
        if sol.status != OPTIMAL:
            return None
        return X @ sol.value(Gam0.expr)

    def linearized_step(self, current: SLPIterate, radius: float) -> Optional[np.ndarray]:
        """X_red = X Gamma0 moved by at most radius per entry, X_red Gamma1 linearized at the witness"""
        X, M, G1 = self.X, current.matrix, current.witness
        n, m = X.shape
        k = M.shape[1]
        model = LinearModel("reduce/inner-step")
        Gam0 = model.add_signed_var(m, k, name="Gamma0")
        Gam1 = model.add_signed_var(k, m, name="Gamma1")
        Delta = model.add_signed_var(n, m, name="Delta")
        delta = model.add_scalar_var(nonneg=True, name="delta")
        moved = X @ Gam0.expr
        model.add_matrix_inequality(moved, M + radius, name="Xred<=M+r")
        model.add_matrix_inequality(M - radius, moved, name="Xred>=M-r")
        model.add_matrix_equality((moved - M) @ G1 + M @ Gam1.expr + Delta.expr, X, name="X=XredGamma1+Delta")
        model.add_inf_norm_bound([Gam0], 1.0, name="|Gamma0|<=1")
        model.add_inf_norm_bound([Gam1], 1.0, name="|Gamma1|<=1")
        model.add_inf_norm_bound([Delta], delta, name="|Delta|<=delta")
        model.set_objective(delta, MINIMIZE)
        sol = solve(model)
        if sol.status != OPTIMAL:
            return None
        return X @ sol.value(Gam0.expr)


def merge_aligned_columns(X: np.ndarray, k: int) -> np.ndarray:
    """Sum every column, signed, into the largest-norm column it is most aligned with"""
    R = _head_directions(X, k)
    scores = R.T @ X
    owner = np.argmax(np.abs(scores), axis=0)
    signs = np.sign(scores[owner, np.arange(X.shape[1])])
    signs[signs == 0] = 1.0
    Gamma0 = np.zeros((X.shape[1], k))
    Gamma0[np.arange(X.shape[1]), owner] = signs
    return X @ Gamma0


def reduce_inner(Z: Zonotope, target_cols: int,
                 cfg: Optional[AlternationConfig] = None) -> Tuple[ReducedZonotope, AlternationTrace]:
    """Fewer generators, inside Z, alternating between the two bilinear factors"""
    cfg = cfg or AlternationConfig()
    _check_target(Z, target_cols)
    if target_cols == Z.num_generators:
        return _unchanged(Z, INNER)
    problem = _InnerProblem(Z.generator)
    current = problem.evaluate(merge_aligned_columns(Z.generator, target_cols))
    if current is None:
        raise InitializationError(f"aligned merge to {target_cols} generators is not certified inside Z")
    trace = AlternationTrace(INNER, center=Z.center)
    trace.record(current.matrix, current.bound)
    for _ in range(cfg.max_iters):
        if current.bound <= _EXACT:
            trace.converged = True
            break
        refit = problem.refit(current)
        nxt = None if refit is None else problem.evaluate(refit)
        if nxt is None or nxt.bound >= current.bound * (1.0 - cfg.stall_tolerance):
            # the alternation sits near a fixed point; move both factors in a trust region
            stepped, accepted = slp_step(current, problem, cfg)
            if accepted and (nxt is None or stepped.bound <= nxt.bound):
                nxt = stepped
            elif nxt is None or nxt.bound >= current.bound:
                _log.info("inner alternation stopped at bound %.9g", current.bound)
                break
        current = nxt
        trace.record(current.matrix, current.bound)
        if trace.stalled(cfg):
            trace.converged = True
            break
    return ReducedZonotope(Zonotope(Z.center, current.matrix), current.bound, INNER), trace


# ----------------------------------------------------------- projections

def mpc_feasible_set(A, B, N: int, x_box: float = 1.0, u_box: float = 1.0) -> HPolytope:
    """Feasible (x0, u0..u_{N-1}) of x+ = A x + B u with box state and input limits and x_N = 0"""
    A = numerics.as_matrix(A, "A")
    B = numerics.as_matrix(B, "B", cols=None)
    n, m = A.shape[0], B.shape[1]
    if A.shape != (n, n) or B.shape[0] != n:
        raise InvalidInputError(f"A must be square and B must have {n} rows; got {A.shape}, {B.shape}")
    if N < 1:
        raise InvalidInputError(f"horizon must be positive, got {N}")
    # state k as a linear map of (x0, u)
    maps = [np.hstack([np.eye(n), np.zeros((n, N * m))])]
    for k in range(N):
        step = A @ maps[-1]
        step[:, n + k * m:n + (k + 1) * m] += B
        maps.append(step)
    rows, rhs = [], []
    for S in maps:
        rows += [S, -S]
        rhs += [np.full(n, x_box), np.full(n, x_box)]
    inputs = np.hstack([np.zeros((N * m, n)), np.eye(N * m)])
    rows += [inputs, -inputs]
    rhs += [np.full(N * m, u_box), np.full(N * m, u_box)]
    rows += [maps[-1], -maps[-1]]
    rhs += [np.zeros(n), np.zeros(n)]
    return HPolytope(np.vstack(rows), np.concatenate(rhs))


class _ProjectionProblem:
    """Decision matrix H_x of X = c + {H_x z <= 1}, certified inside the projection of F"""

    def __init__(self, F: HPolytope, n: int, center: np.ndarray, ball: HPolytope):
        self.F = F
        self.n = n
        self.center = center
        self.ball = ball
        self.lifted = AHPolytope(np.zeros(n), np.hstack([np.eye(n), np.zeros((n, F.dim - n))]), F)

    def inner_set(self, Hx: np.ndarray) -> AHPolytope:
        return AHPolytope(self.center, np.eye(self.n), HPolytope(Hx, np.ones(Hx.shape[0])))

    def evaluate(self, Hx: np.ndarray) -> Optional[SLPIterate]:
        lam, _ = containment.max_scaling(self.inner_set(Hx), self.lifted, method=containment.AH_IN_AH)
        if lam <= 0:
            return None
        if lam < 1.0:
            Hx = Hx * ((1.0 + _MARGIN) / lam)
        X = self.inner_set(Hx)
        model = LinearModel("project/exact")
        eps = model.add_scalar_var(nonneg=True, name="eps")
        inside = containment.encode_ah_in_ah(model, X, self.lifted)
        ball_part = AHPolytope(np.zeros(self.n), np.eye(self.n), self.ball)
        cover = containment.encode_sum_circumbody(model, self.lifted, [X, ball_part], rhs_scales=[None, eps])
        model.set_objective(eps, MINIMIZE)
        sol = solve(model)
        if sol.status != OPTIMAL:
            return None
        witness = (np.asarray(sol.value(inside.lambdas[0])), np.asarray(sol.value(cover.gammas[0])),
                   np.asarray(sol.value(cover.betas[0])).reshape(-1, 1))
        return SLPIterate(Hx, sol.value(eps), witness)

    def linearized_step(self, current: SLPIterate, radius: float) -> Optional[np.ndarray]:
        L0, G1, b1 = current.witness
        Hc = current.matrix
        R, n = Hc.shape
        F, c, ball = self.F, self.center, self.ball
        Hs, Fu = F.H[:, :n], F.H[:, n:]
        g = F.h.reshape(-1, 1)
        q, m = F.num_rows, Fu.shape[1]
        model = LinearModel("project/step")
        dH = model.add_matrix_var(R, n, lb=-radius, ub=radius, name="dH")
        eps = model.add_scalar_var(nonneg=True, name="eps")
        # X inside the projection
        Lam0 = model.add_matrix_var(q, R, nonneg=True, name="Lambda0")
        Gu = model.add_matrix_var(m, n, name="Gamma_u")
        bu = model.add_matrix_var(m, 1, name="beta_u")
        model.add_matrix_equality(Lam0 @ Hc + L0 @ dH, Hs + Fu @ Gu, name="L0Hx=H+FGamma")
        model.add_matrix_inequality(Lam0 @ np.ones((R, 1)), g - (Hs @ c).reshape(-1, 1) + Fu @ bu,
                                    name="L0 1<=g-Hc+Fbeta")
        # the projection inside X ⊕ eps·ball
        Lam1 = model.add_matrix_var(R, q, nonneg=True, name="Lambda1")
        Gam1 = model.add_matrix_var(n, F.dim, name="Gamma1")
        beta1 = model.add_matrix_var(n, 1, name="beta1")
        Lam2 = model.add_matrix_var(ball.num_rows, q, nonneg=True, name="Lambda2")
        Gam2 = model.add_matrix_var(n, F.dim, name="Gamma2")
        beta2 = model.add_matrix_var(n, 1, name="beta2")
        model.add_matrix_equality(Lam1 @ F.H, Hc @ Gam1 + dH @ G1, name="L1HF=HxGamma1")
        model.add_matrix_inequality(Lam1 @ g, np.ones((R, 1)) + Hc @ beta1 + dH @ b1, name="L1g<=1+Hxbeta1")
        model.add_matrix_equality(Lam2 @ F.H, ball.H @ Gam2, name="L2HF=HbGamma2")
        model.add_matrix_inequality(Lam2 @ g, eps.times(ball.h) + ball.H @ beta2, name="L2g<=eps hb+Hbbeta2")
        model.add_matrix_equality(beta1 + beta2, c.reshape(-1, 1), name="beta1+beta2=c")
        model.add_matrix_equality(Gam1 + Gam2, self.lifted.map, name="Gamma1+Gamma2=(I,0)")
        model.set_objective(eps, MINIMIZE)
        sol = solve(model)
        if sol.status != OPTIMAL:
            return None
        return Hc + sol.value(dH)


def _initial_directions(n: int, num_rows: int, rng: np.random.Generator) -> np.ndarray:
    if n == 2:
        angles = 2 * np.pi * np.arange(num_rows) / num_rows
        return np.column_stack([np.cos(angles), np.sin(angles)])
    for _ in range(100):
        D = rng.normal(size=(num_rows, n))
        D /= np.linalg.norm(D, axis=1, keepdims=True)
        try:
            check_bounded(HPolytope(D, np.ones(num_rows)))
            return D
        except UnboundedSetError:
            continue
    raise InitializationError(f"no bounded set of {num_rows} random directions in dimension {n}")


def _check_center(problem: _ProjectionProblem):
    F, n, c = problem.F, problem.n, problem.center
    model = LinearModel("project/center")
    u = model.add_matrix_var(F.dim - n, 1, name="u")
    model.add_matrix_inequality(F.H[:, n:] @ u, (F.h - F.H[:, :n] @ c).reshape(-1, 1))
    if solve(model).status != OPTIMAL:
        raise InvalidCenterError(f"center {c} is not in the projection")
    box = AHPolytope(c, np.eye(n), unit_box(n))
    rho, _ = containment.max_scaling(box, problem.lifted, method=containment.AH_IN_AH)
    if rho <= get_settings().feasibility_tol:
        raise InvalidCenterError(f"center {c} is not in the interior of the projection")


def project_inner(F: HPolytope, n: int, num_rows: int, center=None, cfg: Optional[AlternationConfig] = None,
                  initial_rows=None, ball: Optional[HPolytope] = None) -> Tuple[HPolytope, float, AlternationTrace]:
    """H-polytope X with num_rows facets inside the projection of F onto its first n coordinates

    Returns X as {x | H_x x <= 1 + H_x c}, a certified bound eps on its
    Hausdorff distance to the projection, and the trace of H_x iterates.
    """
    cfg = cfg or AlternationConfig()
    if not 1 <= n <= F.dim:
        raise InvalidInputError(f"projection dimension must lie in [1, {F.dim}], got {n}")
    if num_rows < n + 1:
        raise InvalidInputError(f"need at least {n + 1} rows for a bounded polytope, got {num_rows}")
    center = np.zeros(n) if center is None else numerics.as_vector(center, "center", size=n)
    ball = unit_box(n) if ball is None else ball
    problem = _ProjectionProblem(F, n, center, ball)
    _check_center(problem)
    if initial_rows is None:
        D = _initial_directions(n, num_rows, make_rng(cfg.seed))
        lam, _ = containment.max_scaling(problem.inner_set(D), problem.lifted, method=containment.AH_IN_AH)
        if not np.isfinite(lam) or lam <= 0:
            raise InitializationError("initial directions admit no certified scaling inside the projection")
        H0 = D / lam
    else:
        H0 = numerics.as_matrix(initial_rows, "initial_rows", cols=n)
        if H0.shape[0] != num_rows:
            raise InvalidInputError(f"initial_rows has {H0.shape[0]} rows ({num_rows} expected)")
    start = problem.evaluate(H0)
    if start is None:
        raise InitializationError("initial H-polytope is not certified inside the projection")
    trace = AlternationTrace(PROJECTION, center=center)
    final = run_slp(problem, start, cfg, trace)
    Hx = final.matrix
    return HPolytope(Hx, 1.0 + Hx @ center), final.bound, trace
