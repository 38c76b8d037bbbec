"""
Polytope types and closed-form set operations.

``HPolytope`` is {x | Hx <= h}; ``AHPolytope`` is the affine image
center + map @ base of an ``HPolytope``; ``Zonotope`` is the affine image of
the unit box. Point sets are AH-polytopes whose map has zero columns.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag
from scipy.spatial import ConvexHull

from polycontain import numerics
from polycontain.config import get_settings
from polycontain.errors import (DimensionMismatchError, InvalidInputError, UnboundedSetError,
                                UnsupportedConversionError)
from polycontain.optimize import INFEASIBLE, MAXIMIZE, UNBOUNDED, LinearModel, solve

_log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HPolytope:
    """{x | H x <= h}"""
    H: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        H = numerics.as_matrix(self.H, "H")
        h = numerics.as_vector(self.h, "h", size=H.shape[0])
        if H.shape[0] < 1:
            raise InvalidInputError("an H-polytope needs at least one inequality")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "h", h)
        if get_settings().debug_checks and H.shape[1] and numerics.rank_kernel(H).rank < H.shape[1]:
            raise UnboundedSetError(f"H (shape {H.shape}) has a nontrivial kernel")

    @property
    def dim(self) -> int:
        return self.H.shape[1]

    @property
    def num_rows(self) -> int:
        return self.H.shape[0]

    def __repr__(self):
        return f"HPolytope(rows={self.num_rows}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class AHPolytope:
    """center + map @ base"""
    center: np.ndarray
    map: np.ndarray
    base: HPolytope

    def __post_init__(self):
        center = numerics.as_vector(self.center, "center")
        if np.size(self.map) == 0:
            X = np.zeros((center.size, self.base.dim))
        else:
            X = numerics.as_matrix(self.map, "map")
        if X.shape[0] != center.size:
            raise DimensionMismatchError("map", X.shape[0], "center", center.size, "AH-polytope")
        if X.shape[1] != self.base.dim:
            raise DimensionMismatchError("map", X.shape[1], "base", self.base.dim, "AH-polytope")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "map", X)

    @classmethod
    def point(cls, p) -> "AHPolytope":
        """The singleton {p}"""
        p = numerics.as_vector(p, "point")
        return cls(p, np.zeros((p.size, 0)), HPolytope(np.zeros((1, 0)), np.ones(1)))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def latent_dim(self) -> int:
        return self.map.shape[1]

    @property
    def is_point(self) -> bool:
        return self.latent_dim == 0

    def __repr__(self):
        return f"AHPolytope(dim={self.dim}, latent={self.latent_dim}, base_rows={self.base.num_rows})"


@dataclass(frozen=True, eq=False)
class Zonotope:
    """center + generator @ [-1, 1]^cols"""
    center: np.ndarray
    generator: np.ndarray

    def __post_init__(self):
        center = numerics.as_vector(self.center, "center")
        if np.size(self.generator) == 0:
            G = np.zeros((center.size, 0))
        else:
            G = numerics.as_matrix(self.generator, "generator")
        if G.shape[0] != center.size:
            raise DimensionMismatchError("generator", G.shape[0], "center", center.size, "zonotope")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "generator", G)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def num_generators(self) -> int:
        return self.generator.shape[1]

    @property
    def order(self) -> float:
        return self.num_generators / self.dim

    def __repr__(self):
        return f"Zonotope(dim={self.dim}, generators={self.num_generators})"


Set = Union[HPolytope, AHPolytope, Zonotope]


def _require_same_dim(a: Set, b: Set, context: str, names=("first", "second")):
    if a.dim != b.dim:
        raise DimensionMismatchError(names[0], a.dim, names[1], b.dim, context)


def unit_box(n: int) -> HPolytope:
    """[I; -I] x <= 1"""
    if n < 1:
        raise InvalidInputError(f"unit box dimension must be at least 1, got {n}")
    return HPolytope(np.vstack([np.eye(n), -np.eye(n)]), np.ones(2 * n))


def cross_polytope(n: int) -> HPolytope:
    """Unit ball of the 1-norm: s' x <= 1 for every sign vector s"""
    if n < 1:
        raise InvalidInputError(f"cross polytope dimension must be at least 1, got {n}")
    signs = np.array(list(itertools.product([1.0, -1.0], repeat=n)))
    return HPolytope(signs, np.ones(signs.shape[0]))


def as_ahpolytope(s: Set) -> AHPolytope:
    if isinstance(s, AHPolytope):
        return s
    if isinstance(s, Zonotope):
        if s.num_generators == 0:
            return AHPolytope.point(s.center)
        return AHPolytope(s.center, s.generator, unit_box(s.num_generators))
    if isinstance(s, HPolytope):
        return AHPolytope(np.zeros(s.dim), np.eye(s.dim), s)
    raise InvalidInputError(f"cannot convert {type(s).__name__} to an AH-polytope")


def affine_map(G, g, p: Set) -> Union[AHPolytope, Zonotope]:
    """G p + g; zonotopes stay zonotopes"""
    G = numerics.as_matrix(G, "G")
    if G.shape[1] != p.dim:
        raise DimensionMismatchError("G", G.shape[1], "set", p.dim, "affine map")
    g = np.zeros(G.shape[0]) if g is None else numerics.as_vector(g, "g", size=G.shape[0])
    if isinstance(p, Zonotope):
        return Zonotope(G @ p.center + g, G @ p.generator)
    p = as_ahpolytope(p)
    return AHPolytope(G @ p.center + g, G @ p.map, p.base)


def translate(p: Set, t) -> Union[AHPolytope, Zonotope]:
    return affine_map(np.eye(p.dim), t, p)


def scale(p: Set, factor: float) -> Union[AHPolytope, Zonotope]:
    """Center-fixed scaling: <c, X> becomes <c, factor X>; H-polytopes scale about the origin"""
    if factor < 0:
        raise InvalidInputError(f"scale factor must be nonnegative, got {factor}")
    if isinstance(p, Zonotope):
        return Zonotope(p.center, factor * p.generator)
    p = as_ahpolytope(p)
    return AHPolytope(p.center, factor * p.map, p.base)


def stack_bases(bases: Sequence[HPolytope]) -> HPolytope:
    """Cartesian product of H-polytopes (block-diagonal rows)"""
    return HPolytope(block_diag(*[b.H for b in bases]), np.concatenate([b.h for b in bases]))


def minkowski_sum(p1: Set, p2: Set) -> Union[AHPolytope, Zonotope]:
    _require_same_dim(p1, p2, "Minkowski sum")
    if isinstance(p1, Zonotope) and isinstance(p2, Zonotope):
        return Zonotope(p1.center + p2.center, np.hstack([p1.generator, p2.generator]))
    a, b = as_ahpolytope(p1), as_ahpolytope(p2)
    return AHPolytope(a.center + b.center, np.hstack([a.map, b.map]), stack_bases([a.base, b.base]))


def minkowski_sum_all(parts: Sequence[Set]) -> Union[AHPolytope, Zonotope]:
    if not parts:
        raise InvalidInputError("Minkowski sum of an empty list")
    total = parts[0]
    for p in parts[1:]:
        total = minkowski_sum(total, p)
    return total


def intersect(p1: Set, p2: Set) -> AHPolytope:
    """AH-representation of p1 ∩ p2 over the latent space of p1 plus kernel(map2)

    A point x = c1 + X1 z1 lies in p2 iff the residual r = X1 z1 + c1 - c2 lies
    in range(X2) and some z2 = pinv(X2) r + K w with K spanning kernel(X2)
    satisfies H2 z2 <= h2.
    """
    _require_same_dim(p1, p2, "intersection")
    a, b = as_ahpolytope(p1), as_ahpolytope(p2)
    X1, X2 = a.map, b.map
    H2, h2 = b.base.H, b.base.h
    offset = a.center - b.center
    X2_pinv = numerics.pseudo_inverse(X2) if X2.size else np.zeros((X2.shape[1], X2.shape[0]))
    K = numerics.rank_kernel(X2).kernel_basis if X2.shape[1] else np.zeros((0, 0))
    m1, k = X1.shape[1], K.shape[1]
    rows = [np.hstack([a.base.H, np.zeros((a.base.num_rows, k))]),
            np.hstack([H2 @ X2_pinv @ X1, H2 @ K])]
    rhs = [a.base.h, h2 - H2 @ X2_pinv @ offset]
    left_null = numerics.rank_kernel(X2.T).kernel_basis if X2.shape[1] else np.eye(X2.shape[0])
    if left_null.shape[1]:
        N = left_null.T
        rows += [np.hstack([N @ X1, np.zeros((N.shape[0], k))]),
                 np.hstack([-N @ X1, np.zeros((N.shape[0], k))])]
        rhs += [-N @ offset, N @ offset]
    base = HPolytope(np.vstack(rows), np.concatenate(rhs))
    return AHPolytope(a.center, np.hstack([X1, np.zeros((X1.shape[0], k))]), base)


def convex_hull_ahrep(parts: Sequence[Set]) -> AHPolytope:
    """AH-representation of the convex hull of the parts

    Latent variables are (z_1..z_N, l_1..l_N) with H_i z_i <= l_i h_i,
    l >= 0 and sum(l) = 1; the map is (X_1..X_N, c_1..c_N) with zero center.
    """
    if not parts:
        raise InvalidInputError("convex hull of an empty list")
    ah = [as_ahpolytope(p) for p in parts]
    for i, p in enumerate(ah[1:], start=1):
        _require_same_dim(ah[0], p, "convex hull", names=("part 0", f"part {i}"))
    N = len(ah)
    n = ah[0].dim
    block = block_diag(*[p.base.H for p in ah])
    lam_cols = block_diag(*[-p.base.h.reshape(-1, 1) for p in ah])
    m = block.shape[1]
    rows = [np.hstack([block, lam_cols]),
            np.hstack([np.zeros((N, m)), -np.eye(N)]),
            np.hstack([np.zeros((1, m)), np.ones((1, N))]),
            np.hstack([np.zeros((1, m)), -np.ones((1, N))])]
    rhs = np.concatenate([np.zeros(block.shape[0]), np.zeros(N), [1.0], [-1.0]])
    X = np.hstack([p.map for p in ah] + [p.center.reshape(n, 1) for p in ah])
    return AHPolytope(np.zeros(n), X, HPolytope(np.vstack(rows), rhs))


def ah_to_hpolytope(p: Set, tol: float = None) -> HPolytope:
    """H-form of an AH-polytope whose map has full column rank

    {c + X z | H z <= h} = {x | H pinv(X) x <= h + H pinv(X) c} intersected
    with the affine hull c + range(X).
    """
    if isinstance(p, HPolytope):
        return p
    p = as_ahpolytope(p)
    X = p.map
    n, m = X.shape
    if m and numerics.rank_kernel(X, tol).rank < m:
        raise UnsupportedConversionError(
            f"map of shape {X.shape} is rank deficient; no left inverse for the H conversion")
    X_pinv = numerics.pseudo_inverse(X, tol) if m else np.zeros((0, n))
    HX = p.base.H @ X_pinv
    rows = [HX]
    rhs = [p.base.h + HX @ p.center]
    if m < n:
        N = numerics.rank_kernel(X.T, tol).kernel_basis.T if m else np.eye(n)
        rows += [N, -N]
        rhs += [N @ p.center, -(N @ p.center)]
    H = np.vstack(rows)
    keep = np.any(np.abs(H) > 0, axis=1) | (np.concatenate(rhs) < 0)
    return HPolytope(H[keep], np.concatenate(rhs)[keep])


def zonotope_to_hpolytope_2d(Z: Zonotope) -> HPolytope:
    """Facet form of a planar zonotope from the generator normals"""
    if Z.dim != 2:
        raise InvalidInputError(f"planar conversion needs dimension 2, got {Z.dim}")
    G = Z.generator[:, np.linalg.norm(Z.generator, axis=0) > 0] if Z.num_generators else Z.generator
    normals = []
    for g in G.T:
        nrm = np.array([g[1], -g[0]]) / np.linalg.norm(g)
        if not any(abs(abs(nrm @ q) - 1.0) < 1e-12 for q in normals):
            normals.append(nrm)
    if not normals or numerics.matrix_rank(np.array(normals)) < 2:
        for axis in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
            if not any(abs(abs(axis @ q) - 1.0) < 1e-12 for q in normals):
                normals.append(axis)
            if numerics.matrix_rank(np.array(normals)) == 2:
                break
    C = np.array(normals)
    d = C @ Z.center + np.abs(C @ G).sum(axis=1)
    d_neg = -C @ Z.center + np.abs(C @ G).sum(axis=1)
    return HPolytope(np.vstack([C, -C]), np.concatenate([d, d_neg]))


def zonotope_facets(Z: Zonotope) -> HPolytope:
    """Facet form of a zonotope whose generators span the space

    Each (n-1)-subset of generators spanning a hyperplane contributes the
    normal given by the generalized cross product of its columns.
    """
    n, m = Z.dim, Z.num_generators
    G = Z.generator
    if numerics.matrix_rank(G) < n:
        raise UnsupportedConversionError("zonotope facets need generators spanning the ambient space")
    if n == 1:
        C = np.ones((1, 1))
    else:
        subsets = np.array(list(itertools.combinations(range(m), n - 1)))
        sub = G[:, subsets].transpose(1, 0, 2)  # (count, n, n-1)
        C = np.empty((subsets.shape[0], n))
        for k in range(n):
            minors = np.delete(sub, k, axis=1)
            C[:, k] = (-1) ** k * np.linalg.det(minors)
        norms = np.linalg.norm(C, axis=1)
        C = C[norms > 1e-12 * max(1.0, norms.max(initial=0.0))]
        C = C / np.linalg.norm(C, axis=1, keepdims=True)
        # one representative per direction up to sign
        sign = np.sign(C[np.arange(C.shape[0]), np.argmax(np.abs(C) > 1e-12, axis=1)])
        C = np.unique(np.round(C * sign[:, None], 12), axis=0)
    reach = np.abs(C @ G).sum(axis=1)
    return HPolytope(np.vstack([C, -C]), np.concatenate([C @ Z.center + reach, -C @ Z.center + reach]))


def to_hpolytope(p: Set) -> HPolytope:
    """Best available H-form: exact facets for zonotopes, pseudo-inverse form otherwise"""
    if isinstance(p, HPolytope):
        return p
    if isinstance(p, Zonotope):
        if p.dim == 2:
            return zonotope_to_hpolytope_2d(p)
        return zonotope_facets(p)
    return ah_to_hpolytope(p)


def support(p: Set, direction) -> Tuple[float, np.ndarray]:
    """max c'x over the set and a maximizer"""
    c = numerics.as_vector(direction, "direction", size=p.dim)
    if isinstance(p, Zonotope):
        s = np.sign(c @ p.generator)
        return float(c @ p.center + np.abs(c @ p.generator).sum()), p.center + p.generator @ s
    a = as_ahpolytope(p)
    if a.is_point:
        return float(c @ a.center), a.center.copy()
    model = LinearModel("support")
    z = model.add_matrix_var(a.latent_dim, 1, name="z")
    model.add_matrix_inequality(a.base.H @ z, a.base.h)
    model.set_objective((c @ a.map).reshape(1, -1) @ z, MAXIMIZE)
    sol = solve(model)
    if sol.status == UNBOUNDED:
        raise UnboundedSetError(f"support function unbounded in direction {c}")
    if sol.status == INFEASIBLE:
        return -np.inf, np.full(p.dim, np.nan)
    zeta = sol.value(z).reshape(-1)
    return float(c @ a.center + sol.objective_value), a.center + a.map @ zeta


def is_empty(p: Set) -> bool:
    """LP feasibility of the base polytope"""
    if isinstance(p, Zonotope):
        return False
    a = as_ahpolytope(p)
    model = LinearModel("emptiness")
    z = model.add_matrix_var(a.latent_dim, 1, name="z")
    model.add_matrix_inequality(a.base.H @ z, a.base.h)
    return solve(model).status == INFEASIBLE


def check_bounded(p: Set):
    """Raise ``UnboundedSetError`` unless all 2n axis supports are finite"""
    for k in range(p.dim):
        for sgn in (1.0, -1.0):
            e = np.zeros(p.dim)
            e[k] = sgn
            support(p, e)


def chebyshev_center(P: HPolytope) -> Tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed Euclidean ball

    An empty polytope gives radius -inf; zero radius means not full dimensional.
    """
    model = LinearModel("chebyshev")
    x = model.add_matrix_var(P.dim, 1, name="x")
    r = model.add_scalar_var(nonneg=True, name="r")
    norms = np.linalg.norm(P.H, axis=1)
    model.add_matrix_inequality(P.H @ x + r.times(norms), P.h)
    model.set_objective(r, MAXIMIZE)
    sol = solve(model)
    if sol.status == INFEASIBLE:
        return np.full(P.dim, np.nan), -np.inf
    if sol.status == UNBOUNDED:
        raise UnboundedSetError("H-polytope contains balls of any radius")
    return sol.value(x).reshape(-1), sol.value(r)


def full_dimensional(P: HPolytope, tol: float = None) -> bool:
    tol = get_settings().feasibility_tol if tol is None else tol
    return chebyshev_center(P)[1] > tol


def vertices_2d(p: Set, directions: int = 64) -> np.ndarray:
    """Boundary polygon of a planar set, counterclockwise

    Zonotopes use their generator sign patterns; other sets are sampled
    through the support function and hulled.
    """
    if p.dim != 2:
        raise InvalidInputError(f"planar vertices need dimension 2, got {p.dim}")
    if isinstance(p, Zonotope) and p.num_generators <= get_settings().vertex_cap:
        signs = np.array(list(itertools.product([-1.0, 1.0], repeat=p.num_generators)))
        pts = p.center + signs @ p.generator.T
    else:
        angles = np.linspace(0.0, 2 * np.pi, directions, endpoint=False)
        pts = np.array([support(p, (np.cos(t), np.sin(t)))[1] for t in angles])
    return order_polygon(pts)


def order_polygon(points: np.ndarray) -> np.ndarray:
    """Convex hull of planar points sorted by angle around the centroid"""
    pts = np.unique(np.round(np.asarray(points, dtype=float), 12), axis=0)
    if pts.shape[0] >= 3 and numerics.matrix_rank(pts - pts.mean(axis=0)) == 2:
        pts = pts[ConvexHull(pts).vertices]
    centroid = pts.mean(axis=0)
    angles = np.arctan2(pts[:, 1] - centroid[1], pts[:, 0] - centroid[0])
    return pts[np.argsort(angles, kind="stable")]


def sample_points(p: Set, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Points of the set: random sign patterns for zonotopes, random-direction support points otherwise"""
    if isinstance(p, Zonotope):
        coeffs = rng.uniform(-1.0, 1.0, size=(count, p.num_generators))
        return [p.center + p.generator @ c for c in coeffs]
    out = []
    for _ in range(count):
        c = rng.normal(size=p.dim)
        t = rng.uniform()
        _, x = support(p, c)
        _, y = support(p, -c)
        out.append(t * x + (1 - t) * y)
    return out
