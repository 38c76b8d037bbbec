"""
Containment encodings as linear (or mixed-integer) feasibility problems.

Each ``encode_*`` function adds variables and rows to a caller-owned
``LinearModel`` and returns ``CertificateVars``; solving the model and
calling ``extract`` gives a numeric ``ContainmentCertificate``. ``check``
routes a ``ContainmentQuery`` to an encoding and reports one of three
verdicts, never claiming ``refuted`` on a route that is only sufficient.
``max_scaling`` finds the largest center-fixed scaling of the inbody that
an encoding still certifies.

Notation follows the sets: inbody x_c + X {H_x z <= h_x}, circumbody
y_c + Y {H_y z <= h_y}; Lambda >= 0 are the dual multipliers, Gamma and beta
the affine witnesses.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from polycontain import numerics
from polycontain.config import get_settings
from polycontain.errors import DimensionMismatchError, InvalidInputError, SolverError
from polycontain.geometry import (AHPolytope, HPolytope, Set, Zonotope, affine_map, as_ahpolytope,
                                  full_dimensional, to_hpolytope)
from polycontain.optimize import (MAXIMIZE, OPTIMAL, UNBOUNDED, LinearModel, MatrixExpr,
                                  MatrixVar, ScalarVar, SignedVar, Solution, solve)

_log = logging.getLogger(__name__)

H_IN_H = "h-in-h"
AH_IN_H = "ah-in-h"
AH_IN_AH = "ah-in-ah"
ZONOTOPE = "zonotope"
SUM_INBODY = "sum-inbody"
SUM_CIRCUMBODY = "sum-circumbody"
HULL = "hull"
H_HULL = "h-hull"
DISJUNCTIVE = "disjunctive"
ZONOTOPE_HULL = "zonotope-hull"
ZONOTOPE_DISJUNCTIVE = "zonotope-disjunctive"
AUTO = "auto"
METHODS = (H_IN_H, AH_IN_H, AH_IN_AH, ZONOTOPE, SUM_INBODY, SUM_CIRCUMBODY, HULL, H_HULL,
           DISJUNCTIVE, ZONOTOPE_HULL, ZONOTOPE_DISJUNCTIVE, AUTO)
MILP_METHODS = (DISJUNCTIVE, ZONOTOPE_DISJUNCTIVE)

SINGLE = "single"
SUM = "sum"
HULL_OF = "hull"
DISJUNCTION = "disjunction"
KINDS = (SINGLE, SUM, HULL_OF, DISJUNCTION)

CONTAINED = "contained_certified"
NOT_CERTIFIED = "not_certified"
REFUTED = "refuted"

CONVEX = "convex"
BINARY = "binary"


# -------------------------------------------------------------- certificates

@dataclass
class ContainmentCertificate:
    """Numeric multipliers witnessing one encoding"""
    encoding_tag: str
    lambdas: List[np.ndarray] = field(default_factory=list)
    gammas: List[np.ndarray] = field(default_factory=list)
    betas: List[np.ndarray] = field(default_factory=list)
    mixers: Optional[np.ndarray] = None
    mixer_kind: Optional[str] = None
    scale: float = 1.0
    rhs_scales: Optional[List[float]] = None

    def to_dict(self) -> dict:
        return {
            "encoding": self.encoding_tag,
            "lambdas": [L.tolist() for L in self.lambdas],
            "gammas": [G.tolist() for G in self.gammas],
            "betas": [b.tolist() for b in self.betas],
            "mixers": None if self.mixers is None else self.mixers.tolist(),
            "mixer_kind": self.mixer_kind,
            "scale": self.scale,
            "rhs_scales": self.rhs_scales,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ContainmentCertificate":
        try:
            return cls(
                encoding_tag=data["encoding"],
                lambdas=[np.array(L, dtype=float).reshape(len(L), -1) if len(L) else np.zeros((0, 0))
                         for L in data.get("lambdas", [])],
                gammas=[np.array(G, dtype=float).reshape(len(G), -1) if len(G) else np.zeros((0, 0))
                        for G in data.get("gammas", [])],
                betas=[np.array(b, dtype=float).reshape(-1) for b in data.get("betas", [])],
                mixers=None if data.get("mixers") is None else np.array(data["mixers"], dtype=float),
                mixer_kind=data.get("mixer_kind"),
                scale=float(data.get("scale", 1.0)),
                rhs_scales=data.get("rhs_scales"),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidInputError(f"malformed certificate: {err}") from err

    def save(self, filepath: str):
        with open(filepath, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, filepath: str) -> "ContainmentCertificate":
        with open(filepath, "r") as f:
            return cls.from_dict(json.load(f))

    def mixers_valid(self, tol: float = 1e-7) -> bool:
        """Convex weights sum to one; binary choices pick exactly one part"""
        if self.mixers is None:
            return True
        m = self.mixers
        if self.mixer_kind == BINARY:
            return bool(np.all(np.abs(m * (1 - m)) <= tol) and abs(m.sum() - 1) <= tol)
        return bool(m.min(initial=0.0) >= -tol and abs(m.sum() - 1) <= 1e-6)


@dataclass
class CertificateVars:
    """Model handles of one encoding, turned numeric by ``extract``"""
    encoding_tag: str
    lambdas: List[MatrixVar] = field(default_factory=list)
    gammas: List[Union[MatrixVar, SignedVar, MatrixExpr]] = field(default_factory=list)
    betas: List[Union[MatrixVar, SignedVar, MatrixExpr]] = field(default_factory=list)
    mixers: Optional[MatrixVar] = None
    mixer_kind: Optional[str] = None
    scale: Optional[ScalarVar] = None
    rhs_scales: Optional[List[Optional[ScalarVar]]] = None

    def extract(self, sol: Solution) -> ContainmentCertificate:
        return ContainmentCertificate(
            encoding_tag=self.encoding_tag,
            lambdas=[np.asarray(sol.value(L)) for L in self.lambdas],
            gammas=[np.asarray(sol.value(G)) for G in self.gammas],
            betas=[np.asarray(sol.value(b)).reshape(-1) for b in self.betas],
            mixers=None if self.mixers is None else np.asarray(sol.value(self.mixers)).reshape(-1),
            mixer_kind=self.mixer_kind,
            scale=1.0 if self.scale is None else sol.value(self.scale),
            rhs_scales=None if self.rhs_scales is None else
            [1.0 if d is None else sol.value(d) for d in self.rhs_scales],
        )


# --------------------------------------------------------------------- helpers

def _col(v) -> np.ndarray:
    return np.asarray(v, dtype=float).reshape(-1, 1)


def _scaled(X: np.ndarray, scale: Optional[ScalarVar]):
    """Inbody map, multiplied by the scale variable when one is given"""
    return X if scale is None else scale.times(X)


def _check_dims(inbody: Set, circumbody: Set, context: str):
    if inbody.dim != circumbody.dim:
        raise DimensionMismatchError("inbody", inbody.dim, "circumbody", circumbody.dim, context)


def _check_parts(parts: Sequence, context: str):
    if not parts:
        raise InvalidInputError(f"{context} needs at least one part")
    for i, p in enumerate(parts[1:], start=1):
        if p.dim != parts[0].dim:
            raise DimensionMismatchError("part 0", parts[0].dim, f"part {i}", p.dim, context)


def _require(s, kind, role: str, tag: str):
    if not isinstance(s, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise InvalidInputError(f"{tag} encoding needs a {names} {role}, got {type(s).__name__}")


def _mixer(vars_: MatrixVar, i: int) -> ScalarVar:
    return ScalarVar(vars_.ids[i:i + 1, :], vars_.nonneg, vars_.binary, vars_.name)


# ----------------------------------------------------------------- encodings

def encode_h_in_h(model: LinearModel, Px: HPolytope, Py: HPolytope,
                  scale: Optional[ScalarVar] = None) -> CertificateVars:
    """Lambda H_x = H_y, Lambda h_x <= h_y, Lambda >= 0 (lossless)"""
    _require(Px, HPolytope, "inbody", H_IN_H)
    _require(Py, HPolytope, "circumbody", H_IN_H)
    _check_dims(Px, Py, H_IN_H)
    if scale is not None:
        cert = encode_ah_in_h(model, as_ahpolytope(Px), Py, scale=scale)
        cert.encoding_tag = H_IN_H
        return cert
    Lam = model.add_matrix_var(Py.num_rows, Px.num_rows, nonneg=True, name="Lambda")
    model.add_matrix_equality(Lam @ Px.H, Py.H, name="LHx=Hy")
    model.add_matrix_inequality(Lam @ _col(Px.h), _col(Py.h), name="Lhx<=hy")
    return CertificateVars(H_IN_H, lambdas=[Lam])


def encode_ah_in_h(model: LinearModel, X: Set, Py: HPolytope,
                   scale: Optional[ScalarVar] = None) -> CertificateVars:
    """Lambda H_x = H_y X, Lambda h_x <= h_y - H_y x_c (lossless)"""
    _require(Py, HPolytope, "circumbody", AH_IN_H)
    X = as_ahpolytope(X)
    _check_dims(X, Py, AH_IN_H)
    Hx, hx = X.base.H, X.base.h
    Lam = model.add_matrix_var(Py.num_rows, Hx.shape[0], nonneg=True, name="Lambda")
    model.add_matrix_equality(Lam @ Hx, Py.H @ _scaled(X.map, scale), name="LHx=HyX")
    model.add_matrix_inequality(Lam @ _col(hx), _col(Py.h - Py.H @ X.center), name="Lhx<=hy-Hyx")
    return CertificateVars(AH_IN_H, lambdas=[Lam], scale=scale)


def encode_ah_in_ah(model: LinearModel, X: Set, Y: Set, scale: Optional[ScalarVar] = None) -> CertificateVars:
    """X = Y Gamma, y_c - x_c = Y beta, Lambda H_x = H_y Gamma, Lambda h_x <= h_y + H_y beta

    Sufficient; also necessary when ``necessity_holds(Y.map, Y.base.H)`` and
    the inbody base is full dimensional.
    """
    X, Y = as_ahpolytope(X), as_ahpolytope(Y)
    _check_dims(X, Y, AH_IN_AH)
    Hx, hx = X.base.H, X.base.h
    Hy, hy = Y.base.H, Y.base.h
    Gam = model.add_matrix_var(Y.latent_dim, X.latent_dim, name="Gamma")
    beta = model.add_matrix_var(Y.latent_dim, 1, name="beta")
    Lam = model.add_matrix_var(Hy.shape[0], Hx.shape[0], nonneg=True, name="Lambda")
    model.add_matrix_equality(Y.map @ Gam, _scaled(X.map, scale), name="X=YGamma")
    model.add_matrix_equality(Y.map @ beta, _col(Y.center - X.center), name="yc-xc=Ybeta")
    model.add_matrix_equality(Lam @ Hx, Hy @ Gam, name="LHx=HyGamma")
    model.add_matrix_inequality(Lam @ _col(hx), _col(hy) + Hy @ beta, name="Lhx<=hy+Hybeta")
    return CertificateVars(AH_IN_AH, lambdas=[Lam], gammas=[Gam], betas=[beta], scale=scale)


def encode_zono_in_zono(model: LinearModel, Zx: Zonotope, Zy: Zonotope,
                        scale: Optional[ScalarVar] = None, radius=1.0) -> CertificateVars:
    """X = Y Gamma, y_c - x_c = Y beta, ||(Gamma, beta)||_inf <= radius (sufficient)"""
    _require(Zx, Zonotope, "inbody", ZONOTOPE)
    _require(Zy, Zonotope, "circumbody", ZONOTOPE)
    _check_dims(Zx, Zy, ZONOTOPE)
    Gam = model.add_signed_var(Zy.num_generators, Zx.num_generators, name="Gamma")
    beta = model.add_signed_var(Zy.num_generators, 1, name="beta")
    model.add_matrix_equality(Zy.generator @ Gam.expr, _scaled(Zx.generator, scale), name="X=YGamma")
    model.add_matrix_equality(Zy.generator @ beta.expr, _col(Zy.center - Zx.center), name="yc-xc=Ybeta")
    model.add_inf_norm_bound([Gam, beta], radius, name="|Gamma,beta|<=1")
    return CertificateVars(ZONOTOPE, gammas=[Gam], betas=[beta], scale=scale)


def encode_sum_inbody(model: LinearModel, parts: Sequence[Set], Py: Union[HPolytope, AHPolytope],
                      scale: Optional[ScalarVar] = None) -> CertificateVars:
    """Lambda_i H_{x,i} = H_y X_i, sum Lambda_i h_{x,i} <= h_y - H_y sum x_{c,i} (lossless)"""
    if isinstance(Py, AHPolytope):
        if not (np.allclose(Py.map, np.eye(Py.dim)) and np.allclose(Py.center, 0.0)):
            raise InvalidInputError("sum-inbody circumbody must be an H-polytope (identity-mapped AH accepted)")
        Py = Py.base
    _require(Py, HPolytope, "circumbody", SUM_INBODY)
    parts = [as_ahpolytope(p) for p in parts]
    _check_parts(parts, SUM_INBODY)
    _check_dims(parts[0], Py, SUM_INBODY)
    lambdas = []
    total = None
    for i, p in enumerate(parts):
        Lam = model.add_matrix_var(Py.num_rows, p.base.num_rows, nonneg=True, name=f"Lambda{i}")
        model.add_matrix_equality(Lam @ p.base.H, Py.H @ _scaled(p.map, scale), name=f"L{i}Hx=HyX{i}")
        term = Lam @ _col(p.base.h)
        total = term if total is None else total + term
        lambdas.append(Lam)
    center = np.sum([p.center for p in parts], axis=0)
    model.add_matrix_inequality(total, _col(Py.h - Py.H @ center), name="sumLhx<=hy-Hyx")
    return CertificateVars(SUM_INBODY, lambdas=lambdas, scale=scale)


def encode_sum_circumbody(model: LinearModel, X: Set, parts: Sequence[Set],
                          scale: Optional[ScalarVar] = None,
                          rhs_scales: Optional[Sequence[Optional[ScalarVar]]] = None) -> CertificateVars:
    """Per part: Lambda_i H_x = H_i Gamma_i, Lambda_i h_x <= d_i h_i + H_i beta_i;
    jointly: sum (y_i - Y_i beta_i) = x_c and sum Y_i Gamma_i = X (sufficient)

    ``rhs_scales`` optionally replaces part i by its center-fixed scaling d_i.
    """
    X = as_ahpolytope(X)
    parts = [as_ahpolytope(p) for p in parts]
    _check_parts(parts, SUM_CIRCUMBODY)
    _check_dims(X, parts[0], SUM_CIRCUMBODY)
    rhs_scales = list(rhs_scales) if rhs_scales is not None else [None] * len(parts)
    if len(rhs_scales) != len(parts):
        raise InvalidInputError(f"{len(rhs_scales)} rhs scales for {len(parts)} parts")
    lambdas, gammas, betas = [], [], []
    center_sum = MatrixExpr.constant(np.zeros((X.dim, 1)))
    map_sum = MatrixExpr.constant(np.zeros((X.dim, X.latent_dim)))
    for i, (p, d) in enumerate(zip(parts, rhs_scales)):
        Hi, hi = p.base.H, p.base.h
        Lam = model.add_matrix_var(Hi.shape[0], X.base.num_rows, nonneg=True, name=f"Lambda{i}")
        Gam = model.add_matrix_var(p.latent_dim, X.latent_dim, name=f"Gamma{i}")
        beta = model.add_matrix_var(p.latent_dim, 1, name=f"beta{i}")
        model.add_matrix_equality(Lam @ X.base.H, Hi @ Gam, name=f"L{i}Hx=H{i}Gamma{i}")
        rhs = _col(hi) if d is None else d.times(_col(hi))
        model.add_matrix_inequality(Lam @ _col(X.base.h), rhs + Hi @ beta, name=f"L{i}hx<=h{i}+H{i}beta{i}")
        center_sum = center_sum + _col(p.center) - p.map @ beta
        map_sum = map_sum + p.map @ Gam
        lambdas.append(Lam)
        gammas.append(Gam)
        betas.append(beta)
    model.add_matrix_equality(center_sum, _col(X.center), name="sum(yi-Yibeta_i)=xc")
    model.add_matrix_equality(map_sum, _scaled(X.map, scale), name="sumYiGamma_i=X")
    return CertificateVars(SUM_CIRCUMBODY, lambdas=lambdas, gammas=gammas, betas=betas, scale=scale,
                           rhs_scales=list(rhs_scales) if any(d is not None for d in rhs_scales) else None)


def encode_hull_circumbody(model: LinearModel, X: Set, parts: Sequence[Set],
                           scale: Optional[ScalarVar] = None, tag: str = HULL) -> CertificateVars:
    """Lambda_i H_x = H_i Gamma_i, Lambda_i h_x <= l_i h_i + H_i beta_i,
    x_c = sum (l_i y_i - Y_i beta_i), X = sum Y_i Gamma_i, l >= 0, sum l = 1 (sufficient)"""
    X = as_ahpolytope(X)
    parts = [as_ahpolytope(p) for p in parts]
    _check_parts(parts, tag)
    _check_dims(X, parts[0], tag)
    N = len(parts)
    lam = model.add_matrix_var(N, 1, nonneg=True, name="weights")
    model.add_matrix_equality(np.ones((1, N)) @ lam, 1.0, name="sum(weights)=1")
    lambdas, gammas, betas = [], [], []
    center_sum = MatrixExpr.constant(np.zeros((X.dim, 1)))
    map_sum = MatrixExpr.constant(np.zeros((X.dim, X.latent_dim)))
    for i, p in enumerate(parts):
        Hi, hi = p.base.H, p.base.h
        li = _mixer(lam, i)
        Lam = model.add_matrix_var(Hi.shape[0], X.base.num_rows, nonneg=True, name=f"Lambda{i}")
        Gam = model.add_matrix_var(p.latent_dim, X.latent_dim, name=f"Gamma{i}")
        beta = model.add_matrix_var(p.latent_dim, 1, name=f"beta{i}")
        model.add_matrix_equality(Lam @ X.base.H, Hi @ Gam, name=f"L{i}Hx=H{i}Gamma{i}")
        model.add_matrix_inequality(Lam @ _col(X.base.h), li.times(_col(hi)) + Hi @ beta,
                                    name=f"L{i}hx<=l{i}h{i}+H{i}beta{i}")
        center_sum = center_sum + li.times(_col(p.center)) - p.map @ beta
        map_sum = map_sum + p.map @ Gam
        lambdas.append(Lam)
        gammas.append(Gam)
        betas.append(beta)
    model.add_matrix_equality(center_sum, _col(X.center), name="xc=sum(liyi-Yibeta_i)")
    model.add_matrix_equality(map_sum, _scaled(X.map, scale), name="X=sumYiGamma_i")
    return CertificateVars(tag, lambdas=lambdas, gammas=gammas, betas=betas, mixers=lam,
                           mixer_kind=CONVEX, scale=scale)


def encode_h_in_hull(model: LinearModel, X: Set, h_parts: Sequence[HPolytope],
                     scale: Optional[ScalarVar] = None) -> CertificateVars:
    """Hull of H-polytopes: the identity-map case of ``encode_hull_circumbody``"""
    for p in h_parts:
        _require(p, HPolytope, "part", H_HULL)
    return encode_hull_circumbody(model, X, h_parts, scale=scale, tag=H_HULL)


def encode_disjunctive(model: LinearModel, X: Set, circumbodies: Sequence[HPolytope],
                       scale: Optional[ScalarVar] = None) -> CertificateVars:
    """Lambda_i H_x = H_i Gamma_i, Lambda_i h_x <= d_i h_i - H_i beta_i, sum d = 1,
    sum beta_i = x_c, sum Gamma_i = X, d binary (lossless)"""
    for p in circumbodies:
        _require(p, HPolytope, "circumbody", DISJUNCTIVE)
    X = as_ahpolytope(X)
    _check_parts(circumbodies, DISJUNCTIVE)
    _check_dims(X, circumbodies[0], DISJUNCTIVE)
    N = len(circumbodies)
    delta = model.add_matrix_var(N, 1, binary=True, name="delta")
    model.add_matrix_equality(np.ones((1, N)) @ delta, 1.0, name="sum(delta)=1")
    lambdas, gammas, betas = [], [], []
    beta_sum = MatrixExpr.constant(np.zeros((X.dim, 1)))
    gamma_sum = MatrixExpr.constant(np.zeros((X.dim, X.latent_dim)))
    for i, P in enumerate(circumbodies):
        di = _mixer(delta, i)
        Lam = model.add_matrix_var(P.num_rows, X.base.num_rows, nonneg=True, name=f"Lambda{i}")
        Gam = model.add_matrix_var(X.dim, X.latent_dim, name=f"Gamma{i}")
        beta = model.add_matrix_var(X.dim, 1, name=f"beta{i}")
        model.add_matrix_equality(Lam @ X.base.H, P.H @ Gam, name=f"L{i}Hx=H{i}Gamma{i}")
        model.add_matrix_inequality(Lam @ _col(X.base.h) + P.H @ beta, di.times(_col(P.h)),
                                    name=f"L{i}hx<=d{i}h{i}-H{i}beta{i}")
        beta_sum = beta_sum + beta
        gamma_sum = gamma_sum + Gam
        lambdas.append(Lam)
        gammas.append(Gam)
        betas.append(beta)
    model.add_matrix_equality(beta_sum, _col(X.center), name="sum(beta)=xc")
    model.add_matrix_equality(gamma_sum, _scaled(X.map, scale), name="sum(Gamma)=X")
    return CertificateVars(DISJUNCTIVE, lambdas=lambdas, gammas=gammas, betas=betas, mixers=delta,
                           mixer_kind=BINARY, scale=scale)


def _encode_zono_mixture(model: LinearModel, Zx: Zonotope, parts: Sequence[Zonotope], binary: bool,
                         scale: Optional[ScalarVar], tag: str) -> CertificateVars:
    _require(Zx, Zonotope, "inbody", tag)
    for p in parts:
        _require(p, Zonotope, "part", tag)
    _check_parts(parts, tag)
    _check_dims(Zx, parts[0], tag)
    N = len(parts)
    weights = model.add_matrix_var(N, 1, nonneg=True, binary=binary, name="delta" if binary else "weights")
    model.add_matrix_equality(np.ones((1, N)) @ weights, 1.0, name="sum(weights)=1")
    gammas, betas = [], []
    center_sum = MatrixExpr.constant(np.zeros((Zx.dim, 1)))
    map_sum = MatrixExpr.constant(np.zeros((Zx.dim, Zx.num_generators)))
    for i, Z in enumerate(parts):
        wi = _mixer(weights, i)
        Gam = model.add_signed_var(Z.num_generators, Zx.num_generators, name=f"Gamma{i}")
        beta = model.add_signed_var(Z.num_generators, 1, name=f"beta{i}")
        model.add_inf_norm_bound([Gam, beta], wi.times(np.ones((Z.num_generators, 1))),
                                 name=f"|Gamma{i},beta{i}|<=w{i}")
        center_sum = center_sum + Z.generator @ beta.expr + wi.times(_col(Z.center))
        map_sum = map_sum + Z.generator @ Gam.expr
        gammas.append(Gam)
        betas.append(beta)
    model.add_matrix_equality(center_sum, _col(Zx.center), name="sum(Yibeta_i+wiyi)=xc")
    model.add_matrix_equality(map_sum, _scaled(Zx.generator, scale), name="sumYiGamma_i=X")
    return CertificateVars(tag, gammas=gammas, betas=betas, mixers=weights,
                           mixer_kind=BINARY if binary else CONVEX, scale=scale)


def encode_zono_in_hull(model: LinearModel, Zx: Zonotope, zono_parts: Sequence[Zonotope],
                        scale: Optional[ScalarVar] = None) -> CertificateVars:
    """||(Gamma_i | beta_i)||_inf <= l_i with convex weights l (sufficient)"""
    return _encode_zono_mixture(model, Zx, zono_parts, False, scale, ZONOTOPE_HULL)


def encode_zono_disjunctive(model: LinearModel, Zx: Zonotope, zono_circumbodies: Sequence[Zonotope],
                            scale: Optional[ScalarVar] = None) -> CertificateVars:
    """||(Gamma_i | beta_i)||_inf <= d_i with binary d (sufficient per selected part)"""
    return _encode_zono_mixture(model, Zx, zono_circumbodies, True, scale, ZONOTOPE_DISJUNCTIVE)


# ------------------------------------------------------------------ necessity

def necessity_holds(Y_map, Hy, tol: Optional[float] = None) -> bool:
    """range(pinv(Hy') Y') + kernel(Hy') spans R^{q_y}

    When true, the affine-map encoding is also necessary for containment.
    """
    Y = numerics.as_matrix(Y_map, "Y")
    H = numerics.as_matrix(Hy, "Hy")
    if Y.shape[1] != H.shape[1]:
        raise DimensionMismatchError("Y columns", Y.shape[1], "Hy columns", H.shape[1], "necessity test")
    q = H.shape[0]
    if Y.size == 0 or H.shape[1] == 0:
        image = np.zeros((q, 0))
    else:
        image = numerics.range_basis(numerics.pseudo_inverse(H.T, tol) @ Y.T, tol)
    kernel = numerics.rank_kernel(H.T, tol).kernel_basis if H.shape[1] else np.eye(q)
    joined = np.hstack([image, kernel])
    return joined.shape[1] >= q and numerics.matrix_rank(joined, tol) == q


# -------------------------------------------------------------------- queries

@dataclass
class ContainmentQuery:
    """inbody ⊆ circumbody, where either side may be a list

    ``kind`` says how a circumbody list combines: ``sum`` (Minkowski),
    ``hull`` (convex hull) or ``disjunction`` (union). A list inbody is a
    Minkowski sum and needs an H-polytope circumbody.
    """
    inbody: Union[Set, List[Set]]
    circumbody: Union[Set, List[Set]]
    kind: str = SINGLE
    method: str = AUTO

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown query kind {self.kind!r}; expected one of {KINDS}")
        if self.method not in METHODS:
            raise InvalidInputError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if isinstance(self.circumbody, (list, tuple)) and self.kind == SINGLE:
            if len(self.circumbody) != 1:
                raise InvalidInputError("a circumbody list needs kind sum, hull or disjunction")
            self.circumbody = self.circumbody[0]
        elif self.kind != SINGLE and not isinstance(self.circumbody, (list, tuple)):
            self.circumbody = [self.circumbody]
        inb = self.inbody if isinstance(self.inbody, (list, tuple)) else [self.inbody]
        circ = self.circumbody if isinstance(self.circumbody, (list, tuple)) else [self.circumbody]
        _check_parts(list(inb), "containment inbody")
        for i, c in enumerate(circ):
            if c.dim != inb[0].dim:
                raise DimensionMismatchError("inbody", inb[0].dim, "circumbody" if len(circ) == 1 else f"circumbody {i}",
                                             c.dim, "containment query")


@dataclass
class CheckResult:
    verdict: str
    method: str
    lossless: bool
    certificate: Optional[ContainmentCertificate] = None

    @property
    def contained(self) -> bool:
        return self.verdict == CONTAINED

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "method": self.method, "lossless": self.lossless}


def _all(items, kind) -> bool:
    return all(isinstance(p, kind) for p in items)


def _base_full_dimensional(X: Set) -> bool:
    if isinstance(X, Zonotope):
        return X.num_generators > 0
    base = X if isinstance(X, HPolytope) else X.base
    return base.dim > 0 and full_dimensional(base)


def resolve_method(query: ContainmentQuery) -> Tuple[str, bool]:
    """Encoding chosen for a query and whether it is lossless for it"""
    method = query.method
    inb, circ = query.inbody, query.circumbody
    if isinstance(inb, (list, tuple)):
        if method not in (AUTO, SUM_INBODY):
            raise InvalidInputError(f"a Minkowski-sum inbody needs the {SUM_INBODY} method, got {method}")
        return SUM_INBODY, True
    if query.kind == SINGLE:
        if method == AUTO:
            if isinstance(circ, HPolytope):
                method = H_IN_H if isinstance(inb, HPolytope) else AH_IN_H
            else:
                c = as_ahpolytope(circ)
                if isinstance(inb, Zonotope) and isinstance(circ, Zonotope) and \
                        not necessity_holds(c.map, c.base.H):
                    method = ZONOTOPE
                else:
                    method = AH_IN_AH
        if method in (H_IN_H, AH_IN_H):
            return method, True
        if method == AH_IN_AH:
            c = as_ahpolytope(circ)
            return method, necessity_holds(c.map, c.base.H) and _base_full_dimensional(inb)
        if method == ZONOTOPE:
            return method, False
        raise InvalidInputError(f"method {method} does not apply to a single circumbody")
    if query.kind == SUM:
        if method not in (AUTO, SUM_CIRCUMBODY):
            raise InvalidInputError(f"a Minkowski-sum circumbody needs {SUM_CIRCUMBODY}, got {method}")
        return SUM_CIRCUMBODY, False
    if query.kind == HULL_OF:
        if method == AUTO:
            if isinstance(inb, Zonotope) and _all(circ, Zonotope):
                method = ZONOTOPE_HULL
            elif _all(circ, HPolytope):
                method = H_HULL
            else:
                method = HULL
        if method not in (HULL, H_HULL, ZONOTOPE_HULL):
            raise InvalidInputError(f"method {method} does not apply to a convex-hull circumbody")
        return method, False
    if method == AUTO:
        if _all(circ, HPolytope):
            method = DISJUNCTIVE
        elif isinstance(inb, Zonotope) and _all(circ, Zonotope):
            method = ZONOTOPE_DISJUNCTIVE
        else:
            method = DISJUNCTIVE
    if method == DISJUNCTIVE:
        return method, True
    if method == ZONOTOPE_DISJUNCTIVE:
        return method, False
    raise InvalidInputError(f"method {method} does not apply to a disjunction")


def encode_query(model: LinearModel, query: ContainmentQuery, method: str,
                 scale: Optional[ScalarVar] = None) -> CertificateVars:
    inb, circ = query.inbody, query.circumbody
    if method == H_IN_H:
        return encode_h_in_h(model, inb, circ, scale=scale)
    if method == AH_IN_H:
        return encode_ah_in_h(model, inb, circ, scale=scale)
    if method == AH_IN_AH:
        return encode_ah_in_ah(model, inb, circ, scale=scale)
    if method == ZONOTOPE:
        return encode_zono_in_zono(model, inb, circ, scale=scale)
    if method == SUM_INBODY:
        return encode_sum_inbody(model, inb, circ, scale=scale)
    if method == SUM_CIRCUMBODY:
        return encode_sum_circumbody(model, inb, circ, scale=scale)
    if method == HULL:
        return encode_hull_circumbody(model, inb, circ, scale=scale)
    if method == H_HULL:
        return encode_h_in_hull(model, inb, circ, scale=scale)
    if method == DISJUNCTIVE:
        parts = [p if isinstance(p, HPolytope) else to_hpolytope(p) for p in circ]
        return encode_disjunctive(model, inb, parts, scale=scale)
    if method == ZONOTOPE_HULL:
        return encode_zono_in_hull(model, inb, circ, scale=scale)
    if method == ZONOTOPE_DISJUNCTIVE:
        return encode_zono_disjunctive(model, inb, circ, scale=scale)
    raise InvalidInputError(f"unknown method {method!r}")


def check(query: ContainmentQuery) -> CheckResult:
    """Solve the chosen encoding; ``refuted`` only on lossless routes"""
    method, lossless = resolve_method(query)
    model = LinearModel(f"contain/{method}")
    cert_vars = encode_query(model, query, method)
    sol = solve(model)
    _log.debug("%s: status %s after %d pivots", model.name, sol.status, sol.pivots)
    if sol.status == OPTIMAL:
        return CheckResult(CONTAINED, method, lossless, cert_vars.extract(sol))
    if sol.status == UNBOUNDED:
        raise SolverError(f"feasibility problem {model.name} reported unbounded")
    return CheckResult(REFUTED if lossless else NOT_CERTIFIED, method, lossless)


def contains(inbody, circumbody, method: str = AUTO, kind: str = SINGLE) -> CheckResult:
    return check(ContainmentQuery(inbody, circumbody, kind=kind, method=method))


def max_scaling(inbody, circumbody, method: str = AUTO, kind: str = SINGLE,
                rel_tol: float = 1e-7) -> Tuple[float, Optional[ContainmentCertificate]]:
    """Largest l such that the encoding certifies <x_c, l X> inside the circumbody

    Returns ``(inf, None)`` when the scale is unbounded.
    """
    query = ContainmentQuery(inbody, circumbody, kind=kind, method=method)
    method, _ = resolve_method(query)
    if method not in MILP_METHODS:
        model = LinearModel(f"scale/{method}")
        s = model.add_scalar_var(nonneg=True, name="scale")
        cert_vars = encode_query(model, query, method, scale=s)
        model.set_objective(s, MAXIMIZE)
        sol = solve(model)
        if sol.status == UNBOUNDED:
            _log.warning("scaling unbounded for %s", method)
            return np.inf, None
        if sol.status != OPTIMAL:
            return 0.0, None
        return sol.value(s), cert_vars.extract(sol)
    return _bisect_scaling(query, method, rel_tol)


def _feasible_at(query: ContainmentQuery, method: str, value: float):
    model = LinearModel(f"scale/{method}@{value:.6g}")
    s = model.add_scalar_var(lb=value, ub=value, name="scale")
    cert_vars = encode_query(model, query, method, scale=s)
    sol = solve(model)
    return cert_vars.extract(sol) if sol.optimal else None


def _bisect_scaling(query: ContainmentQuery, method: str, rel_tol: float):
    lo, lo_cert = 0.0, _feasible_at(query, method, 0.0)
    if lo_cert is None:
        return 0.0, None
    hi = 1.0
    while True:
        cert = _feasible_at(query, method, hi)
        if cert is None:
            break
        lo, lo_cert = hi, cert
        hi *= 2.0
        if hi > 1e12:
            _log.warning("scaling unbounded for %s", method)
            return np.inf, None
    while hi - lo > rel_tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        cert = _feasible_at(query, method, mid)
        if cert is None:
            hi = mid
        else:
            lo, lo_cert = mid, cert
    return lo, lo_cert


def check_sum_of_maps(A_list: Sequence, S: Set) -> CheckResult:
    """(sum A_i) S inside the Minkowski sum of the A_i S, certified with Gamma_i = I"""
    if not A_list:
        raise InvalidInputError("need at least one map")
    mats = [numerics.as_matrix(A, f"A{i}") for i, A in enumerate(A_list)]
    total = np.sum(mats, axis=0)
    inbody = affine_map(total, None, S)
    parts = [affine_map(A, None, S) for A in mats]
    return check(ContainmentQuery(inbody, parts, kind=SUM, method=SUM_CIRCUMBODY))


# -------------------------------------------------------------------- replay

def _pos(a) -> float:
    return float(np.max(np.asarray(a, dtype=float), initial=0.0))


def _abs(a) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float)), initial=0.0))


def replay_certificate(cert: ContainmentCertificate, inbody, circumbody) -> float:
    """Largest violation of the encoding's rows with the certificate substituted

    Recomputed with plain array arithmetic from the inputs, independent of
    the model that produced the certificate.
    """
    tag, s = cert.encoding_tag, cert.scale
    worst = max([_pos(-L) for L in cert.lambdas], default=0.0)
    if tag in (H_IN_H, AH_IN_H):
        X = as_ahpolytope(inbody)
        L = cert.lambdas[0]
        P = circumbody
        return max(worst, _abs(L @ X.base.H - s * P.H @ X.map),
                   _pos(L @ X.base.h - P.h + P.H @ X.center))
    if tag == AH_IN_AH:
        X, Y = as_ahpolytope(inbody), as_ahpolytope(circumbody)
        L, G, b = cert.lambdas[0], cert.gammas[0], cert.betas[0]
        return max(worst, _abs(s * X.map - Y.map @ G), _abs(Y.center - X.center - Y.map @ b),
                   _abs(L @ X.base.H - Y.base.H @ G), _pos(L @ X.base.h - Y.base.h - Y.base.H @ b))
    if tag == ZONOTOPE:
        G, b = cert.gammas[0], cert.betas[0]
        row_sums = np.abs(G).sum(axis=1) + np.abs(b)
        return max(worst, _abs(s * inbody.generator - circumbody.generator @ G),
                   _abs(circumbody.center - inbody.center - circumbody.generator @ b), _pos(row_sums - 1.0))
    if tag == SUM_INBODY:
        parts = [as_ahpolytope(p) for p in inbody]
        P = circumbody.base if isinstance(circumbody, AHPolytope) else circumbody
        total = np.zeros(P.num_rows)
        for L, p in zip(cert.lambdas, parts):
            worst = max(worst, _abs(L @ p.base.H - s * P.H @ p.map))
            total += L @ p.base.h
        center = np.sum([p.center for p in parts], axis=0)
        return max(worst, _pos(total - P.h + P.H @ center))
    if tag in (SUM_CIRCUMBODY, HULL, H_HULL):
        X = as_ahpolytope(inbody)
        parts = [as_ahpolytope(p) for p in circumbody]
        weights = cert.mixers if tag != SUM_CIRCUMBODY else np.array(cert.rhs_scales or [1.0] * len(parts))
        center = np.zeros(X.dim)
        mapped = np.zeros_like(X.map)
        for L, G, b, p, w in zip(cert.lambdas, cert.gammas, cert.betas, parts, weights):
            worst = max(worst, _abs(L @ X.base.H - p.base.H @ G),
                        _pos(L @ X.base.h - w * p.base.h - p.base.H @ b))
            cw = w if tag != SUM_CIRCUMBODY else 1.0
            center += cw * p.center - p.map @ b
            mapped += p.map @ G
        worst = max(worst, _abs(center - X.center), _abs(mapped - s * X.map))
        if tag != SUM_CIRCUMBODY:
            worst = max(worst, _pos(-weights), abs(weights.sum() - 1.0))
        return worst
    if tag == DISJUNCTIVE:
        X = as_ahpolytope(inbody)
        parts = [p if isinstance(p, HPolytope) else to_hpolytope(p) for p in circumbody]
        d = cert.mixers
        for L, G, b, P, di in zip(cert.lambdas, cert.gammas, cert.betas, parts, d):
            worst = max(worst, _abs(L @ X.base.H - P.H @ G), _pos(L @ X.base.h - di * P.h + P.H @ b))
        worst = max(worst, _abs(np.sum(cert.betas, axis=0) - X.center),
                    _abs(np.sum(cert.gammas, axis=0) - s * X.map),
                    abs(d.sum() - 1.0), _abs(d * (1.0 - d)))
        return worst
    if tag in (ZONOTOPE_HULL, ZONOTOPE_DISJUNCTIVE):
        w = cert.mixers
        center = np.zeros(inbody.dim)
        mapped = np.zeros_like(inbody.generator)
        for G, b, Z, wi in zip(cert.gammas, cert.betas, circumbody, w):
            if Z.num_generators:
                worst = max(worst, _pos(np.abs(G).sum(axis=1) + np.abs(b) - wi))
            center += Z.generator @ b + wi * Z.center
            mapped += Z.generator @ G
        worst = max(worst, _abs(center - inbody.center), _abs(mapped - s * inbody.generator),
                    _pos(-w), abs(w.sum() - 1.0))
        return worst
    raise InvalidInputError(f"cannot replay a certificate tagged {tag!r}")


def interpretation_check(cert: ContainmentCertificate, inbody: Set, circumbody: Set) -> bool:
    """The affine witness maps the inbody base into the circumbody base: -beta + Gamma P_x ⊆ P_y"""
    if cert.encoding_tag not in (AH_IN_AH, ZONOTOPE):
        raise InvalidInputError(f"no geometric reading for {cert.encoding_tag} certificates")
    X, Y = as_ahpolytope(inbody), as_ahpolytope(circumbody)
    witness = AHPolytope(-cert.betas[0], cert.gammas[0], X.base)
    return check(ContainmentQuery(witness, Y.base, method=AH_IN_H)).contained


def certificate_ok(cert: ContainmentCertificate, inbody, circumbody, tol: Optional[float] = None) -> bool:
    tol = get_settings().certificate_tol if tol is None else tol
    return replay_certificate(cert, inbody, circumbody) <= tol and cert.mixers_valid()
