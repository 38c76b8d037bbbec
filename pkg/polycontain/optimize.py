"""
Linear model builder and solvers.

A ``LinearModel`` owns scalar variables (bounds, integrality) and blocks of
linear constraints. Encodings write into it through matrix-shaped handles:
``MatrixVar`` for decision matrices and ``MatrixExpr`` for affine matrix
expressions such as ``Y @ Gamma - X``. Solving goes through a ``Solver``:
``SimplexSolver`` (dense two-phase tableau simplex, branch-and-bound for
binaries) is built in; ``HighsSolver`` delegates to scipy when available.
"""

import heapq
import io
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from polycontain.config import get_settings
from polycontain.errors import InvalidInputError, ResourceLimitError, SolverError

_log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

MINIMIZE = "minimize"
MAXIMIZE = "maximize"
FEASIBILITY = "feasibility"
SENSES = (MINIMIZE, MAXIMIZE, FEASIBILITY)

LE = "<="
EQ = "="

INTEGRALITY_TOL = 1e-6


# ---------------------------------------------------------------- expressions

def _normalize_key(key):
    """Keep both axes when indexing a grid so results stay 2-D"""
    if not isinstance(key, tuple):
        key = (key, slice(None))
    return tuple(slice(k, k + 1 if k != -1 else None) if isinstance(k, (int, np.integer)) else k for k in key)


class MatrixVar:
    """A rows x cols grid of model variable ids"""
    __array_ufunc__ = None

    def __init__(self, ids: np.ndarray, nonneg: bool = False, binary: bool = False, name: Optional[str] = None):
        self.ids = np.asarray(ids, dtype=int)
        self.nonneg = nonneg
        self.binary = binary
        self.name = name

    @property
    def shape(self) -> Tuple[int, int]:
        return self.ids.shape

    @property
    def rows(self) -> int:
        return self.ids.shape[0]

    @property
    def cols(self) -> int:
        return self.ids.shape[1]

    @property
    def size(self) -> int:
        return self.ids.size

    def expr(self) -> "MatrixExpr":
        flat = self.ids.reshape(-1)
        return MatrixExpr(self.shape, flat, np.eye(flat.size), np.zeros(self.shape))

    def __getitem__(self, key) -> "MatrixVar":
        return MatrixVar(self.ids[_normalize_key(key)], self.nonneg, self.binary, self.name)

    def __repr__(self):
        return f"MatrixVar({self.name or '?'}, shape={self.shape})"

    # arithmetic goes through the expression form
    def __add__(self, other): return self.expr() + other
    def __radd__(self, other): return self.expr() + other
    def __sub__(self, other): return self.expr() - other
    def __rsub__(self, other): return (-self.expr()) + other
    def __neg__(self): return -self.expr()
    def __mul__(self, other): return self.expr() * other
    def __rmul__(self, other): return self.expr() * other
    def __matmul__(self, other): return self.expr() @ other
    def __rmatmul__(self, other): return self.expr().__rmatmul__(other)


class ScalarVar(MatrixVar):
    """A single variable, usable as a scale factor on constant matrices"""

    @property
    def id(self) -> int:
        return int(self.ids[0, 0])

    def times(self, C) -> "MatrixExpr":
        """Affine expression s * C for a constant matrix C"""
        C = _as_const(C)
        return MatrixExpr(C.shape, np.array([self.id]), C.reshape(-1, 1).copy(), np.zeros(C.shape))


def _as_const(C) -> np.ndarray:
    A = np.asarray(C, dtype=float)
    if A.ndim == 0:
        return A.reshape(1, 1)
    if A.ndim == 1:
        return A.reshape(-1, 1)
    if A.ndim != 2:
        raise InvalidInputError(f"constant must be at most 2D, got {A.ndim}D")
    return A


def as_expr(x, shape: Optional[Tuple[int, int]] = None) -> "MatrixExpr":
    """Lift a variable, expression, scalar or array to a ``MatrixExpr``

    Vectors become columns; scalars broadcast to ``shape`` when given.
    """
    if isinstance(x, MatrixExpr):
        return x
    if isinstance(x, MatrixVar):
        return x.expr()
    C = np.asarray(x, dtype=float)
    if C.ndim == 0 and shape is not None:
        C = np.full(shape, float(C))
    return MatrixExpr.constant(_as_const(C))


class MatrixExpr:
    """Affine matrix expression ``const + reshape(K @ x[ids])``

    Entries are stored in row-major order: entry (i, j) of the expression is
    row ``i * cols + j`` of ``K``. ``ids`` may repeat; coefficients add up.
    """
    __array_ufunc__ = None

    def __init__(self, shape, ids, K, const):
        self.shape = (int(shape[0]), int(shape[1]))
        self.ids = np.asarray(ids, dtype=int).reshape(-1)
        self.K = np.asarray(K, dtype=float).reshape(self.shape[0] * self.shape[1], self.ids.size)
        self.const = np.asarray(const, dtype=float).reshape(self.shape)

    @classmethod
    def constant(cls, C) -> "MatrixExpr":
        C = _as_const(C)
        return cls(C.shape, np.zeros(0, dtype=int), np.zeros((C.size, 0)), C)

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def is_constant(self) -> bool:
        return self.ids.size == 0

    def _check_same_shape(self, other: "MatrixExpr", op: str):
        if self.shape != other.shape:
            raise InvalidInputError(f"shape mismatch in {op}: {self.shape} vs {other.shape}")

    def __add__(self, other) -> "MatrixExpr":
        o = as_expr(other, self.shape)
        self._check_same_shape(o, "+")
        return MatrixExpr(self.shape, np.concatenate([self.ids, o.ids]),
                          np.hstack([self.K, o.K]), self.const + o.const)

    def __radd__(self, other) -> "MatrixExpr":
        return self + other

    def __neg__(self) -> "MatrixExpr":
        return MatrixExpr(self.shape, self.ids, -self.K, -self.const)

    def __sub__(self, other) -> "MatrixExpr":
        return self + (-as_expr(other, self.shape))

    def __rsub__(self, other) -> "MatrixExpr":
        return (-self) + other

    def __mul__(self, a) -> "MatrixExpr":
        if not np.isscalar(a):
            raise InvalidInputError("only scalar multiplication is supported; use @ for matrix products")
        return MatrixExpr(self.shape, self.ids, self.K * a, self.const * a)

    __rmul__ = __mul__

    def __matmul__(self, other) -> "MatrixExpr":
        if isinstance(other, (MatrixExpr, MatrixVar)):
            o = as_expr(other)
            if not self.is_constant and not o.is_constant:
                raise InvalidInputError("product of two variable expressions is not linear")
            if self.is_constant:
                return o.__rmatmul__(self.const)
            other = o.const
        R = _as_const(other)
        if R.shape[0] != self.cols:
            raise InvalidInputError(f"shape mismatch in @: {self.shape} @ {R.shape}")
        r, c = self.shape
        K3 = self.K.reshape(r, c, self.ids.size)
        K_new = np.einsum("ijk,js->isk", K3, R).reshape(r * R.shape[1], self.ids.size)
        return MatrixExpr((r, R.shape[1]), self.ids, K_new, self.const @ R)

    def __rmatmul__(self, other) -> "MatrixExpr":
        L = np.asarray(other, dtype=float)
        if L.ndim == 1:
            L = L.reshape(1, -1)
        if L.shape[1] != self.rows:
            raise InvalidInputError(f"shape mismatch in @: {L.shape} @ {self.shape}")
        r, c = self.shape
        K3 = self.K.reshape(r, c, self.ids.size)
        K_new = np.tensordot(L, K3, axes=(1, 0)).reshape(L.shape[0] * c, self.ids.size)
        return MatrixExpr((L.shape[0], c), self.ids, K_new, L @ self.const)

    def __getitem__(self, key) -> "MatrixExpr":
        idx = np.arange(self.rows * self.cols).reshape(self.shape)[_normalize_key(key)]
        return MatrixExpr(idx.shape, self.ids, self.K[idx.reshape(-1)], self.const[_normalize_key(key)])

    @property
    def T(self) -> "MatrixExpr":
        r, c = self.shape
        K3 = self.K.reshape(r, c, self.ids.size).transpose(1, 0, 2)
        return MatrixExpr((c, r), self.ids, K3.reshape(r * c, self.ids.size), self.const.T)

    def sum_rows(self) -> "MatrixExpr":
        """Row sums as a column expression"""
        return self @ np.ones((self.cols, 1))

    def __repr__(self):
        return f"MatrixExpr(shape={self.shape}, terms={self.ids.size})"


def hstack(parts: Sequence) -> MatrixExpr:
    """Horizontal concatenation of expressions with equal row counts"""
    exprs = [as_expr(p) for p in parts]
    rows = {e.rows for e in exprs}
    if len(rows) != 1:
        raise InvalidInputError(f"hstack needs equal row counts, got {sorted(rows)}")
    r = rows.pop()
    total = sum(e.cols for e in exprs)
    ids = np.concatenate([e.ids for e in exprs]) if exprs else np.zeros(0, dtype=int)
    K = np.zeros((r, total, ids.size))
    const = np.zeros((r, total))
    col = k = 0
    for e in exprs:
        K[:, col:col + e.cols, k:k + e.ids.size] = e.K.reshape(r, e.cols, e.ids.size)
        const[:, col:col + e.cols] = e.const
        col += e.cols
        k += e.ids.size
    return MatrixExpr((r, total), ids, K.reshape(r * total, ids.size), const)


def vstack(parts: Sequence) -> MatrixExpr:
    """Vertical concatenation of expressions with equal column counts"""
    return hstack([as_expr(p).T for p in parts]).T


# --------------------------------------------------------------------- model

@dataclass
class SignedVar:
    """Free matrix written as ``pos - neg`` with both parts nonnegative"""
    pos: MatrixVar
    neg: MatrixVar

    @property
    def expr(self) -> MatrixExpr:
        return self.pos.expr() - self.neg.expr()

    @property
    def abs_bound(self) -> MatrixExpr:
        """An upper bound on the entrywise absolute value, tight at some optimum"""
        return self.pos.expr() + self.neg.expr()

    @property
    def shape(self):
        return self.pos.shape


@dataclass
class _Block:
    ids: np.ndarray
    K: np.ndarray
    rhs: np.ndarray
    relation: str
    name: str


@dataclass
class LinearProgram:
    """Dense arrays of a model in minimization form"""
    c: np.ndarray
    offset: float
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    binary: np.ndarray
    sign: float = 1.0

    @property
    def num_vars(self) -> int:
        return self.c.size

    def with_bounds(self, lb: np.ndarray, ub: np.ndarray) -> "LinearProgram":
        return LinearProgram(self.c, self.offset, self.A_ub, self.b_ub, self.A_eq, self.b_eq,
                             lb, ub, self.binary, self.sign)


class LinearModel:
    """Variables, linear constraints and an optional linear objective"""

    def __init__(self, name: str = "model"):
        self.name = name
        self._lb: List[float] = []
        self._ub: List[float] = []
        self._binary: List[bool] = []
        self._var_names: List[str] = []
        self._blocks: List[_Block] = []
        self.sense = FEASIBILITY
        self._objective: Optional[MatrixExpr] = None

    # -- variables

    @property
    def num_vars(self) -> int:
        return len(self._lb)

    @property
    def num_constraints(self) -> int:
        return sum(b.rhs.size for b in self._blocks)

    @property
    def num_binaries(self) -> int:
        return sum(self._binary)

    def add_matrix_var(self, rows: int, cols: int, nonneg: bool = False, binary: bool = False,
                       lb: Optional[float] = None, ub: Optional[float] = None,
                       name: Optional[str] = None) -> MatrixVar:
        """Fresh rows x cols variables; ``binary`` implies bounds [0, 1]"""
        if rows < 0 or cols < 0:
            raise InvalidInputError(f"matrix variable shape must be nonnegative, got ({rows}, {cols})")
        if binary:
            lo, hi = 0.0, 1.0
        else:
            lo = 0.0 if nonneg else -np.inf
            if lb is not None:
                lo = max(lo, float(lb))
            hi = np.inf if ub is None else float(ub)
        start = self.num_vars
        count = rows * cols
        self._lb.extend([lo] * count)
        self._ub.extend([hi] * count)
        self._binary.extend([binary] * count)
        label = name or f"v{start}"
        self._var_names.extend(f"{label}[{i},{j}]" for i in range(rows) for j in range(cols))
        ids = np.arange(start, start + count).reshape(rows, cols)
        return MatrixVar(ids, nonneg=nonneg or binary, binary=binary, name=label)

    def add_scalar_var(self, nonneg: bool = False, binary: bool = False, lb: Optional[float] = None,
                       ub: Optional[float] = None, name: Optional[str] = None) -> ScalarVar:
        v = self.add_matrix_var(1, 1, nonneg=nonneg, binary=binary, lb=lb, ub=ub, name=name)
        return ScalarVar(v.ids, v.nonneg, v.binary, v.name)

    def add_signed_var(self, rows: int, cols: int, name: Optional[str] = None) -> SignedVar:
        label = name or f"v{self.num_vars}"
        return SignedVar(self.add_matrix_var(rows, cols, nonneg=True, name=label + "+"),
                         self.add_matrix_var(rows, cols, nonneg=True, name=label + "-"))

    def set_bounds(self, var: MatrixVar, lb: Optional[float] = None, ub: Optional[float] = None):
        for i in var.ids.reshape(-1):
            if lb is not None:
                self._lb[i] = float(lb)
            if ub is not None:
                self._ub[i] = float(ub)

    # -- constraints

    def _add_block(self, expr: MatrixExpr, relation: str, name: Optional[str]):
        if expr.rows * expr.cols == 0:
            return
        self._blocks.append(_Block(expr.ids.copy(), expr.K.copy(), -expr.const.reshape(-1), relation,
                                   name or f"c{len(self._blocks)}"))

    def add_matrix_equality(self, lhs, rhs, name: Optional[str] = None):
        """One equality row per entry of lhs = rhs"""
        left = as_expr(lhs)
        right = as_expr(rhs, left.shape)
        if left.shape != right.shape:
            raise InvalidInputError(f"equality {name or ''} shape mismatch: {left.shape} vs {right.shape}")
        self._add_block(left - right, EQ, name)

    def add_matrix_inequality(self, lhs, rhs, name: Optional[str] = None):
        """One row per entry of lhs <= rhs"""
        left = as_expr(lhs)
        right = as_expr(rhs, left.shape)
        if left.shape != right.shape:
            raise InvalidInputError(f"inequality {name or ''} shape mismatch: {left.shape} vs {right.shape}")
        self._add_block(left - right, LE, name)

    def add_inf_norm_bound(self, parts: Sequence, bound, name: Optional[str] = None):
        """Row-wise absolute sums of the horizontally joined parts stay below ``bound``

        ``bound`` is a scalar, a column, or an expression of either shape. Parts
        given as ``SignedVar`` use their split directly; other expressions get
        an explicit nonnegative envelope.
        """
        abs_parts = []
        for k, part in enumerate(parts):
            if isinstance(part, SignedVar):
                abs_parts.append(part.abs_bound)
                continue
            e = as_expr(part)
            envelope = self.add_matrix_var(e.rows, e.cols, nonneg=True, name=f"{name or 'abs'}_{k}")
            self.add_matrix_inequality(e, envelope, name=f"{name or 'abs'}_{k}_up")
            self.add_matrix_inequality(-e, envelope, name=f"{name or 'abs'}_{k}_lo")
            abs_parts.append(envelope.expr())
        if not abs_parts:
            return
        rows = abs_parts[0].rows
        total = abs_parts[0].sum_rows()
        for a in abs_parts[1:]:
            total = total + a.sum_rows()
        b = as_expr(bound)
        if b.shape == (1, 1) and rows != 1:
            b = np.ones((rows, 1)) @ b
        self.add_matrix_inequality(total, b, name=name or "inf_norm")

    # -- objective

    def set_objective(self, expr, sense: str = MINIMIZE):
        if sense not in SENSES:
            raise InvalidInputError(f"unknown objective sense {sense!r}")
        self.sense = sense
        if sense == FEASIBILITY:
            self._objective = None
            return
        e = as_expr(expr)
        if e.shape != (1, 1):
            raise InvalidInputError(f"objective must be scalar, got shape {e.shape}")
        self._objective = e

    # -- export

    def to_program(self) -> LinearProgram:
        n = self.num_vars
        ub_blocks = [b for b in self._blocks if b.relation == LE]
        eq_blocks = [b for b in self._blocks if b.relation == EQ]

        def assemble(blocks):
            m = sum(b.rhs.size for b in blocks)
            A = np.zeros((m, n))
            rhs = np.zeros(m)
            r = 0
            for b in blocks:
                k = b.rhs.size
                np.add.at(A[r:r + k].T, b.ids, b.K.T)
                rhs[r:r + k] = b.rhs
                r += k
            return A, rhs

        A_ub, b_ub = assemble(ub_blocks)
        A_eq, b_eq = assemble(eq_blocks)
        c = np.zeros(n)
        offset = 0.0
        sign = 1.0
        if self._objective is not None:
            np.add.at(c, self._objective.ids, self._objective.K[0])
            offset = float(self._objective.const[0, 0])
            if self.sense == MAXIMIZE:
                sign = -1.0
        return LinearProgram(sign * c, sign * offset, A_ub, b_ub, A_eq, b_eq,
                             np.array(self._lb, dtype=float), np.array(self._ub, dtype=float),
                             np.array(self._binary, dtype=bool), sign)

    def dump(self, target: Union[str, io.TextIOBase, None] = None) -> str:
        """Line-oriented text form: objective, one constraint per line, bounds, binaries"""
        lines = [f"# {self.name}: {self.num_vars} variables, {self.num_constraints} constraints",
                 self.sense]
        if self._objective is not None:
            coeffs = {}
            for i, k in zip(self._objective.ids, self._objective.K[0]):
                coeffs[i] = coeffs.get(i, 0.0) + k
            lines.append("objective: " + _format_row(coeffs, self._var_names)
                         + f" + {self._objective.const[0, 0]:.17g}")
        lines.append("subject to")
        for b in self._blocks:
            for r in range(b.rhs.size):
                coeffs = {}
                for i, k in zip(b.ids, b.K[r]):
                    if k != 0.0:
                        coeffs[i] = coeffs.get(i, 0.0) + k
                lines.append(f"{b.name}_{r}: {_format_row(coeffs, self._var_names)} {b.relation} {b.rhs[r]:.17g}")
        lines.append("bounds")
        for name, lo, hi in zip(self._var_names, self._lb, self._ub):
            lines.append(f"{lo:.17g} <= {name} <= {hi:.17g}")
        binaries = [name for name, is_bin in zip(self._var_names, self._binary) if is_bin]
        if binaries:
            lines.append("binary")
            lines.extend(binaries)
        lines.append("end")
        text = "\n".join(lines) + "\n"
        if isinstance(target, str):
            with open(target, "w") as f:
                f.write(text)
        elif target is not None:
            target.write(text)
        return text


def _format_row(coeffs: Dict[int, float], names: List[str]) -> str:
    if not coeffs:
        return "0"
    return " + ".join(f"{k:.17g} {names[i]}" for i, k in sorted(coeffs.items()))


def add_matrix_var(model: LinearModel, rows: int, cols: int, nonneg: bool = False, binary: bool = False,
                   name: Optional[str] = None) -> MatrixVar:
    return model.add_matrix_var(rows, cols, nonneg=nonneg, binary=binary, name=name)


def add_matrix_equality(model: LinearModel, lhs, rhs, name: Optional[str] = None):
    model.add_matrix_equality(lhs, rhs, name=name)


def add_matrix_inequality(model: LinearModel, lhs, rhs, name: Optional[str] = None):
    model.add_matrix_inequality(lhs, rhs, name=name)


# ------------------------------------------------------------------ solution

@dataclass
class Solution:
    status: str
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective_value: float = float("nan")
    pivots: int = 0
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def value(self, item):
        """Numeric value of a variable, scalar variable or expression"""
        if self.status != OPTIMAL:
            raise SolverError(f"no values available for a solution with status {self.status}")
        if isinstance(item, ScalarVar):
            return float(self.values[item.id])
        if isinstance(item, SignedVar):
            item = item.expr
        if isinstance(item, MatrixVar):
            return self.values[item.ids].astype(float)
        e = as_expr(item)
        return e.const + (e.K @ self.values[e.ids]).reshape(e.shape)


# ------------------------------------------------------------- dense simplex

def _pivot(T: np.ndarray, i: int, j: int):
    T[i] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i])
    T[:, j] = 0.0
    T[i, j] = 1.0


def _lexicographic_row(T: np.ndarray, rows: np.ndarray, col: np.ndarray, reference: np.ndarray) -> int:
    """Among tied leaving rows, the lexicographic minimum of T[r, reference] / col[r]"""
    for k in reference:
        if rows.size == 1:
            break
        q = T[rows, k] / col[rows]
        rows = rows[q <= q.min() + 1e-12 * (1.0 + abs(q.min()))]
    return int(rows[0])


class _Tableau:
    """Two-phase tableau for min c'y, A_le y <= b_le, A_eq y = b_eq, y >= 0"""

    def __init__(self, A_le, b_le, A_eq, b_eq, settings):
        self.settings = settings
        self.pivots = 0
        m1, m2 = A_le.shape[0], A_eq.shape[0]
        self.n = A_le.shape[1] if m1 else A_eq.shape[1]
        self.m1 = m1
        m = m1 + m2
        A = np.vstack([A_le, A_eq]) if m else np.zeros((0, self.n))
        b = np.concatenate([b_le, b_eq])
        negate = b < 0
        needs_art = negate.copy()
        needs_art[m1:] = True
        self.art_rows = np.flatnonzero(needs_art)
        na = self.art_rows.size
        width = self.n + m1 + na
        T = np.zeros((m + 1, width + 1))
        T[:m, :self.n] = A
        T[np.arange(m1), self.n + np.arange(m1)] = 1.0
        T[:m, -1] = b
        T[:m][negate] *= -1.0
        T[self.art_rows, self.n + m1 + np.arange(na)] = 1.0
        basis = np.empty(m, dtype=int)
        basis[:m1] = self.n + np.arange(m1)
        basis[self.art_rows] = self.n + m1 + np.arange(na)
        self.T = T
        self.basis = basis
        self.rows = np.arange(m)
        self.A = A
        self.b = b

    def _run(self, ncols: int) -> str:
        """Pivot to optimality over the first ncols columns

        Dantzig pricing throughout. After a streak of stalled pivots the ratio
        test breaks ties lexicographically against the basis of that moment,
        for the rest of the phase. A pivot stalls when it moves the objective
        by less than the feasibility tolerance scale.
        """
        T, basis = self.T, self.basis
        s = self.settings
        dual_tol = s.pivot_tol
        stalled = 0
        reference = None
        while True:
            if self.pivots >= s.max_pivots:
                raise ResourceLimitError(f"simplex pivot limit {s.max_pivots} reached")
            d = T[-1, :ncols]
            j = int(np.argmin(d)) if ncols else 0
            if ncols == 0 or d[j] >= -dual_tol:
                return OPTIMAL
            col = T[:-1, j]
            pos = col > s.pivot_tol
            if not pos.any():
                return UNBOUNDED
            ratios = np.full(col.size, np.inf)
            ratios[pos] = T[:-1, -1][pos] / col[pos]
            rmin = ratios.min()
            ties = np.flatnonzero(ratios <= rmin + 1e-12 * (1.0 + abs(rmin)))
            if reference is not None:
                i = _lexicographic_row(T, ties, col, reference)
            else:
                i = int(ties[np.argmax(col[ties])])
                if rmin * -d[j] <= s.feasibility_tol * 1e-3 * (1.0 + abs(T[-1, -1])):
                    stalled += 1
                    if stalled >= s.stalled_pivots_before_lexicographic:
                        _log.warning("%d stalled pivots in a row; lexicographic ratio test for the rest of the phase",
                                     stalled)
                        reference = basis.copy()
                        i = _lexicographic_row(T, ties, col, reference)
                else:
                    stalled = 0
            _pivot(T, i, j)
            basis[i] = j
            rhs = T[:-1, -1]
            rhs[np.abs(rhs) < s.feasibility_tol * 1e-3] = 0.0
            rhs[(rhs < 0) & (rhs > -s.feasibility_tol)] = 0.0
            self.pivots += 1

    def _drop_row(self, r: int):
        keep = np.ones(self.T.shape[0], dtype=bool)
        keep[r] = False
        self.T = self.T[keep]
        self.basis = np.delete(self.basis, r)
        self.rows = np.delete(self.rows, r)

    def solve(self, c: np.ndarray) -> Tuple[str, Optional[np.ndarray]]:
        s = self.settings
        n, m1 = self.n, self.m1
        first_art = n + m1
        na = self.art_rows.size
        if na:
            cost = np.zeros(self.T.shape[1])
            cost[first_art:first_art + na] = 1.0
            self.T[-1] = cost - self.T[self.art_rows].sum(axis=0)
            self._run(first_art + na)
            infeasibility = -self.T[-1, -1]
            scale = max(1.0, float(np.abs(self.b).max(initial=0.0)))
            if infeasibility > s.feasibility_tol * scale:
                _log.debug("phase 1 ended with infeasibility %.3g", infeasibility)
                return INFEASIBLE, None
            r = 0
            while r < self.basis.size:
                if self.basis[r] >= first_art:
                    row = self.T[r, :first_art]
                    j = int(np.argmax(np.abs(row))) if first_art else 0
                    if first_art and abs(row[j]) > s.pivot_tol:
                        _pivot(self.T, r, j)
                        self.basis[r] = j
                        self.pivots += 1
                    else:
                        self._drop_row(r)
                        continue
                r += 1
            self.T = np.hstack([self.T[:, :first_art], self.T[:, -1:]])
        cost = np.concatenate([c, np.zeros(m1)])
        cB = cost[self.basis]
        self.T[-1, :-1] = cost - cB @ self.T[:-1, :-1]
        self.T[-1, -1] = -cB @ self.T[:-1, -1]
        status = self._run(first_art)
        if status != OPTIMAL:
            return status, None
        y = np.zeros(first_art)
        y[self.basis] = self.T[:-1, -1]
        return OPTIMAL, self._refine(y)

    def _refine(self, y: np.ndarray) -> np.ndarray:
        """Recompute basic values from the original rows to shed tableau drift"""
        s = self.settings
        if self.basis.size == 0:
            return np.maximum(y, 0.0)
        M = np.hstack([self.A, np.vstack([np.eye(self.m1), np.zeros((self.A.shape[0] - self.m1, self.m1))])])
        M = M[self.rows][:, self.basis]
        try:
            xb = np.linalg.solve(M, self.b[self.rows])
        except np.linalg.LinAlgError:
            _log.debug("basis matrix singular during refinement; keeping tableau values")
            return np.maximum(y, 0.0)
        if np.all(np.isfinite(xb)) and xb.min(initial=0.0) >= -s.feasibility_tol:
            refined = np.zeros_like(y)
            refined[self.basis] = np.maximum(xb, 0.0)
            return refined
        _log.debug("refinement rejected (min basic value %.3g)", xb.min(initial=0.0))
        return np.maximum(y, 0.0)


def _simplex(p: LinearProgram, settings) -> Solution:
    """Solve the LP relaxation of ``p`` (integrality ignored)"""
    n = p.num_vars
    lb, ub = p.lb, p.ub
    if np.any(lb > ub + settings.feasibility_tol):
        return Solution(INFEASIBLE)
    t0 = np.zeros(n)
    columns: List[Tuple[int, float]] = []
    bound_rows: List[Tuple[int, float]] = []
    for j in range(n):
        lo, hi = lb[j], ub[j]
        if np.isfinite(lo) and np.isfinite(hi) and hi - lo <= settings.feasibility_tol:
            t0[j] = lo
        elif np.isfinite(lo):
            t0[j] = lo
            columns.append((j, 1.0))
            if np.isfinite(hi):
                bound_rows.append((len(columns) - 1, hi - lo))
        elif np.isfinite(hi):
            t0[j] = hi
            columns.append((j, -1.0))
        else:
            columns.append((j, 1.0))
            columns.append((j, -1.0))
    ns = len(columns)
    Tmap = np.zeros((n, ns))
    for k, (j, sgn) in enumerate(columns):
        Tmap[j, k] = sgn
    E = np.zeros((len(bound_rows), ns))
    e_rhs = np.zeros(len(bound_rows))
    for r, (k, width) in enumerate(bound_rows):
        E[r, k] = 1.0
        e_rhs[r] = width
    A_le = np.vstack([p.A_ub @ Tmap, E])
    b_le = np.concatenate([p.b_ub - p.A_ub @ t0, e_rhs])
    A_eq = p.A_eq @ Tmap
    b_eq = p.b_eq - p.A_eq @ t0
    _log.debug("simplex: %d <= rows, %d = rows, %d columns", A_le.shape[0], A_eq.shape[0], ns)
    tab = _Tableau(A_le, b_le, A_eq, b_eq, settings)
    status, y = tab.solve(p.c @ Tmap)
    if status != OPTIMAL:
        return Solution(status, pivots=tab.pivots)
    x = Tmap @ y[:ns] + t0
    obj = float(p.c @ x + p.offset)
    return Solution(OPTIMAL, x, p.sign * obj, pivots=tab.pivots)


def _branch_and_bound(p: LinearProgram, settings, relax) -> Solution:
    """Best-bound search with an objective, depth-first for pure feasibility"""
    binaries = np.flatnonzero(p.binary)
    has_objective = bool(np.any(p.c != 0.0))
    order = itertools.count()
    open_nodes = [(-np.inf, next(order), p.lb.copy(), p.ub.copy())]
    best_obj = np.inf
    incumbent: Optional[Solution] = None
    nodes = pivots = 0
    while open_nodes:
        if has_objective:
            bound, _, lb, ub = heapq.heappop(open_nodes)
        else:
            bound, _, lb, ub = open_nodes.pop()
        if bound >= best_obj - 1e-9:
            continue
        nodes += 1
        if nodes > settings.node_limit:
            raise ResourceLimitError(f"branch-and-bound node limit {settings.node_limit} exceeded")
        sol = relax(p.with_bounds(lb, ub))
        pivots += sol.pivots
        if sol.status == INFEASIBLE:
            continue
        if sol.status == UNBOUNDED:
            _log.debug("relaxation unbounded at node %d", nodes)
            return Solution(UNBOUNDED, pivots=pivots, nodes=nodes)
        obj = p.sign * sol.objective_value
        if obj >= best_obj - 1e-9:
            continue
        x = sol.values[binaries]
        frac = np.minimum(x - np.floor(x), np.ceil(x) - x)
        if frac.size == 0 or frac.max() <= INTEGRALITY_TOL:
            best_obj, incumbent = obj, sol
            if not has_objective:
                break
            continue
        k = int(binaries[np.argmax(frac)])
        down_lb, down_ub = lb.copy(), ub.copy()
        down_ub[k] = 0.0
        up_lb, up_ub = lb.copy(), ub.copy()
        up_lb[k] = 1.0
        children = [(down_lb, down_ub), (up_lb, up_ub)]
        if sol.values[k] >= 0.5:
            children.reverse()
        if has_objective:
            for clb, cub in children:
                heapq.heappush(open_nodes, (obj, next(order), clb, cub))
        else:
            for clb, cub in reversed(children):
                open_nodes.append((obj, next(order), clb, cub))
    _log.debug("branch-and-bound: %d nodes, %d pivots", nodes, pivots)
    if incumbent is None:
        return Solution(INFEASIBLE, pivots=pivots, nodes=nodes)
    values = incumbent.values.copy()
    values[binaries] = np.round(values[binaries])
    return Solution(OPTIMAL, values, incumbent.objective_value, pivots=pivots, nodes=nodes)


# ------------------------------------------------------------------- solvers

class Solver(Protocol):
    name: str

    def solve(self, model: LinearModel) -> Solution:
        ...


class SimplexSolver:
    """Built-in dense simplex with branch-and-bound over binaries"""
    name = "simplex"

    def solve(self, model: LinearModel) -> Solution:
        settings = get_settings()
        p = model.to_program()
        _log.debug("%s: %d vars, %d rows, %d binaries", model.name, p.num_vars,
                   p.A_ub.shape[0] + p.A_eq.shape[0], int(p.binary.sum()))
        if p.binary.any():
            return _branch_and_bound(p, settings, lambda q: _simplex(q, settings))
        return _simplex(p, settings)


class HighsSolver:
    """Delegates to scipy's HiGHS interfaces (linprog / milp)"""
    name = "highs"

    def solve(self, model: LinearModel) -> Solution:
        try:
            from scipy.optimize import Bounds, LinearConstraint, linprog, milp
        except ImportError as err:
            raise SolverError("scipy is required for the highs solver") from err
        p = model.to_program()
        if p.binary.any():
            constraints = []
            if p.A_ub.shape[0]:
                constraints.append(LinearConstraint(p.A_ub, -np.inf, p.b_ub))
            if p.A_eq.shape[0]:
                constraints.append(LinearConstraint(p.A_eq, p.b_eq, p.b_eq))
            res = milp(p.c, constraints=constraints, integrality=p.binary.astype(int),
                       bounds=Bounds(p.lb, p.ub))
        else:
            res = linprog(p.c,
                          A_ub=p.A_ub if p.A_ub.shape[0] else None, b_ub=p.b_ub if p.A_ub.shape[0] else None,
                          A_eq=p.A_eq if p.A_eq.shape[0] else None, b_eq=p.b_eq if p.A_eq.shape[0] else None,
                          bounds=np.column_stack([p.lb, p.ub]), method="highs")
        if res.status == 0:
            x = np.asarray(res.x, dtype=float)
            if p.binary.any():
                x[p.binary] = np.round(x[p.binary])
            return Solution(OPTIMAL, x, p.sign * float(p.c @ x + p.offset))
        if res.status == 2:
            return Solution(INFEASIBLE)
        if res.status == 3:
            return Solution(UNBOUNDED)
        if res.status == 1:
            raise ResourceLimitError(f"highs stopped on a limit: {res.message}")
        raise SolverError("highs failed", diagnostic=str(res.message))


_SOLVERS = {"simplex": SimplexSolver, "highs": HighsSolver}


def get_solver(name: Optional[str] = None) -> Solver:
    name = name or get_settings().solver
    try:
        return _SOLVERS[name]()
    except KeyError:
        raise InvalidInputError(f"unknown solver {name!r}; expected one of {sorted(_SOLVERS)}") from None


def solve(model: LinearModel, solver: Optional[Solver] = None) -> Solution:
    """Solve an LP or MILP with the configured solver"""
    solver = solver or get_solver()
    sol = solver.solve(model)
    if sol.optimal and get_settings().debug_checks:
        _check_solution(model, sol)
    return sol


def solve_lp(model: LinearModel, solver: Optional[Solver] = None) -> Solution:
    if model.num_binaries:
        raise InvalidInputError(f"{model.name} has binary variables; use solve_milp")
    return solve(model, solver)


def solve_milp(model: LinearModel, solver: Optional[Solver] = None) -> Solution:
    return solve(model, solver)


def _check_solution(model: LinearModel, sol: Solution):
    p = model.to_program()
    tol = get_settings().certificate_tol
    x = sol.values
    worst = max(float(np.max(p.A_ub @ x - p.b_ub, initial=0.0)),
                float(np.max(np.abs(p.A_eq @ x - p.b_eq), initial=0.0)),
                float(np.max(p.lb - x, initial=0.0)), float(np.max(x - p.ub, initial=0.0)))
    if worst > tol:
        _log.warning("%s: solution violates constraints by %.3g", model.name, worst)
