"""
Ground truth at desk scale: vertex candidates, LP membership, brute-force
containment, exact lossless scaling and the randomized loss experiment.
"""

import csv
import itertools
import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from polycontain import containment, numerics
from polycontain.config import get_settings, make_rng
from polycontain.errors import InvalidInputError, ResourceLimitError
from polycontain.geometry import (HPolytope, Set, Zonotope, as_ahpolytope, scale, zonotope_facets,
                                  zonotope_to_hpolytope_2d)
from polycontain.optimize import MAXIMIZE, MINIMIZE, OPTIMAL, LinearModel, solve

_log = logging.getLogger(__name__)

LOSS_THRESHOLD = 0.01
HISTOGRAM_WIDTH = 0.005


def zonotope_vertex_candidates(Z: Zonotope) -> np.ndarray:
    """All center + G s for s in {-1, 1}^cols, one point per row"""
    cap = get_settings().vertex_cap
    if Z.num_generators > cap:
        raise ResourceLimitError(f"{Z.num_generators} generators exceed the enumeration cap of {cap}")
    signs = np.array(list(itertools.product([-1.0, 1.0], repeat=Z.num_generators)))
    return Z.center + signs @ Z.generator.T


def hpolytope_vertices_smalldim(P: HPolytope, tol: float = 1e-7) -> np.ndarray:
    """Feasible intersections of dim-many hyperplanes, deduplicated"""
    n = P.dim
    if n > 3:
        raise InvalidInputError(f"vertex enumeration supports dimension <= 3, got {n}")
    if n == 0:
        return np.zeros((1, 0))
    found: List[np.ndarray] = []
    for rows in itertools.combinations(range(P.num_rows), n):
        A = P.H[list(rows)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        v = np.linalg.solve(A, P.h[list(rows)])
        if np.all(P.H @ v <= P.h + tol) and not any(np.max(np.abs(v - w)) <= tol for w in found):
            found.append(v)
    return np.array(found).reshape(-1, n)


def vertex_candidates(s: Set) -> np.ndarray:
    """A finite superset of the vertices of a vertex-enumerable set"""
    if isinstance(s, Zonotope):
        return zonotope_vertex_candidates(s)
    if isinstance(s, HPolytope):
        return hpolytope_vertices_smalldim(s)
    a = as_ahpolytope(s)
    if a.is_point:
        return a.center.reshape(1, -1)
    if a.latent_dim > 3:
        raise ResourceLimitError(f"AH-polytope with latent dimension {a.latent_dim} is not vertex-enumerable")
    return a.center + hpolytope_vertices_smalldim(a.base) @ a.map.T


def contains_point(s: Set, p, slack: Optional[float] = None) -> bool:
    """Membership up to ``slack`` (default from settings)

    For AH-polytopes: min t with |c + X z - p| <= t and H z <= h + t; the
    point is a member iff t <= slack.
    """
    slack = get_settings().membership_slack if slack is None else slack
    p = numerics.as_vector(p, "point", size=s.dim)
    if isinstance(s, HPolytope):
        return bool(np.all(s.H @ p <= s.h + slack))
    a = as_ahpolytope(s)
    model = LinearModel("membership")
    z = model.add_matrix_var(a.latent_dim, 1, name="z")
    t = model.add_scalar_var(nonneg=True, name="t")
    residual = a.map @ z + (a.center - p).reshape(-1, 1)
    model.add_matrix_inequality(residual, t.times(np.ones((s.dim, 1))))
    model.add_matrix_inequality(-residual, t.times(np.ones((s.dim, 1))))
    model.add_matrix_inequality(a.base.H @ z, a.base.h.reshape(-1, 1) + t.times(np.ones((a.base.num_rows, 1))))
    model.set_objective(t, MINIMIZE)
    sol = solve(model)
    return sol.status == OPTIMAL and sol.value(t) <= slack


def containment_oracle(inbody: Set, circumbody: Set) -> bool:
    """Every vertex candidate of the inbody is a member of the circumbody"""
    points = vertex_candidates(inbody)
    if isinstance(circumbody, HPolytope):
        slack = get_settings().membership_slack
        return bool(np.all(points @ circumbody.H.T <= circumbody.h + slack))
    if isinstance(circumbody, Zonotope) and circumbody.dim == 2:
        return containment_oracle(inbody, zonotope_to_hpolytope_2d(circumbody))
    return all(contains_point(circumbody, v) for v in points)


def lossless_scaling(Zx: Zonotope, Zy: Zonotope, method: str = "facets") -> float:
    """Largest l with <x_c, l X> inside Zy

    ``facets`` compares support values over the facet normals of Zy;
    ``vertices`` solves one LP with a witness per inbody vertex candidate.
    """
    if method == "facets":
        P = zonotope_facets(Zy)
        reach_x = np.abs(P.H @ Zx.generator).sum(axis=1)
        room = P.h - P.H @ Zx.center
        if np.any(room < -get_settings().feasibility_tol):
            return 0.0
        active = reach_x > 1e-12
        if not active.any():
            return np.inf
        return float(np.min(room[active] / reach_x[active]))
    if method == "vertices":
        signs = np.array(list(itertools.product([-1.0, 1.0], repeat=Zx.num_generators)))
        if Zx.num_generators > get_settings().vertex_cap:
            raise ResourceLimitError("too many inbody generators for the vertex LP")
        model = LinearModel("lossless-scaling")
        lam = model.add_scalar_var(nonneg=True, name="lambda")
        offset = (Zx.center - Zy.center).reshape(-1, 1)
        for k, s in enumerate(signs):
            zeta = model.add_matrix_var(Zy.num_generators, 1, lb=-1.0, ub=1.0, name=f"zeta{k}")
            model.add_matrix_equality(Zy.generator @ zeta - lam.times((Zx.generator @ s).reshape(-1, 1)), offset)
        model.set_objective(lam, MAXIMIZE)
        sol = solve(model)
        if sol.status != OPTIMAL:
            return np.inf if sol.status == "unbounded" else 0.0
        return sol.value(lam)
    raise InvalidInputError(f"unknown lossless scaling method {method!r}")


@dataclass
class LossRecord:
    n: int
    inbody_cols: int
    circumbody_cols: int
    lambda_lossless: float
    lambda_encoding: float
    loss: float


def loss_for_pair(Zx: Zonotope, Zy: Zonotope, lossless_method: str = "facets") -> LossRecord:
    """Relative gap between the exact and the zonotope-encoding maximal scalings"""
    exact = lossless_scaling(Zx, Zy, lossless_method)
    encoded, _ = containment.max_scaling(Zx, Zy, method=containment.ZONOTOPE)
    loss = (exact - encoded) / exact if exact > 0 else 0.0
    return LossRecord(Zx.dim, Zx.num_generators, Zy.num_generators, exact, encoded, loss)


def random_zonotope(rng: np.random.Generator, n: int, cols: int, center_scale: float = 0.0) -> Zonotope:
    """Generator entries U(-1, 1); center U(-center_scale, center_scale) or zero"""
    G = rng.uniform(-1.0, 1.0, size=(n, cols))
    c = rng.uniform(-center_scale, center_scale, size=n) if center_scale > 0 else np.zeros(n)
    return Zonotope(c, G)


def loss_experiment(n_range: Sequence[int] = (3, 4, 5, 6), cols_range: Tuple[Optional[int], int] = (None, 12),
                    trials: int = 500, seed: Optional[int] = None, perturb_centers: bool = False,
                    lossless_method: str = "facets") -> Tuple[List[LossRecord], Dict]:
    """Random zonotope pairs: dimension uniform over ``n_range``, column counts uniform
    in [lower or n, upper], entries U(-1, 1)"""
    rng = make_rng(seed)
    n_values = list(n_range)
    lower, upper = cols_range
    records = []
    for trial in range(trials):
        n = int(rng.choice(n_values))
        lo = n if lower is None else max(lower, n)
        if upper < lo:
            raise InvalidInputError(f"column range [{lo}, {upper}] is empty for n={n}")
        cols_x = int(rng.integers(lo, upper + 1))
        cols_y = int(rng.integers(lo, upper + 1))
        center_scale = 0.1 if perturb_centers else 0.0
        Zx = random_zonotope(rng, n, cols_x, center_scale)
        Zy = random_zonotope(rng, n, cols_y, center_scale)
        if perturb_centers:
            Zx = Zonotope(Zy.center + 0.1 * (Zx.center - Zy.center), Zx.generator)
        records.append(loss_for_pair(Zx, Zy, lossless_method))
        if (trial + 1) % 50 == 0:
            _log.info("loss experiment: %d/%d trials", trial + 1, trials)
    return records, loss_summary(records)


def loss_summary(records: Sequence[LossRecord]) -> Dict:
    losses = np.array([r.loss for r in records], dtype=float)
    if losses.size == 0:
        return {"trials": 0, "fraction_below_0.01": float("nan"), "max_loss": float("nan"), "histogram": []}
    bins = max(1, int(np.ceil(losses.max() / HISTOGRAM_WIDTH)))
    edges = np.linspace(0.0, bins * HISTOGRAM_WIDTH, bins + 1)
    edges[-1] = max(edges[-1], float(losses.max()))
    counts, _ = np.histogram(np.clip(losses, 0.0, None), bins=edges)
    return {
        "trials": int(losses.size),
        "fraction_below_0.01": float(np.mean(losses < LOSS_THRESHOLD)),
        "max_loss": float(losses.max()),
        "min_loss": float(losses.min()),
        "histogram": [{"lo": float(a), "hi": float(b), "count": int(c)}
                      for a, b, c in zip(edges[:-1], edges[1:], counts)],
    }


def write_records_csv(records: Sequence[LossRecord], filepath: str):
    with open(filepath, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(LossRecord.__dataclass_fields__))
        writer.writeheader()
        for r in records:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in asdict(r).items()})


def scaled_oracle(inbody: Zonotope, circumbody: Set, factor: float) -> bool:
    """Vertex-oracle verdict for the center-fixed scaling of the inbody"""
    return containment_oracle(scale(inbody, factor), circumbody)
