"""
Dense linear algebra used by the encodings: rank, kernel basis and
Moore-Penrose pseudo-inverse, plus input coercion helpers.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from polycontain.config import get_settings
from polycontain.errors import InvalidInputError


@dataclass(frozen=True)
class Decomposition:
    """Rank, orthonormal kernel basis (columns) and optionally the pseudo-inverse"""
    rank: int
    kernel_basis: np.ndarray
    pinv: Optional[np.ndarray] = None


def as_matrix(M, name="matrix", cols=None) -> np.ndarray:
    """Coerce to a finite 2-D float array"""
    try:
        A = np.array(M, dtype=float)
    except (TypeError, ValueError) as err:
        raise InvalidInputError(f"{name} must be convertible to a 2D float array, got {type(M)}") from err
    if A.ndim == 1 and cols is not None and cols == 0:
        A = A.reshape(-1, 0)
    elif A.ndim < 2:
        A = np.atleast_2d(A)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2D, got {A.ndim}D")
    if cols is not None and A.shape[1] != cols:
        raise InvalidInputError(f"{name} has {A.shape[1]} column(s) ({cols} expected)")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return A


def as_vector(v, name="vector", size=None) -> np.ndarray:
    """Coerce to a finite 1-D float array"""
    try:
        a = np.array(v, dtype=float).reshape(-1)
    except (TypeError, ValueError) as err:
        raise InvalidInputError(f"{name} must be convertible to a 1D float array, got {type(v)}") from err
    if size is not None and a.size != size:
        raise InvalidInputError(f"{name} has {a.size} elements ({size} expected)")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def default_tol(M: np.ndarray) -> float:
    return get_settings().rank_tol_factor * max(M.shape + (1,))


def _svd(M, tol):
    A = as_matrix(M)
    if tol is None:
        tol = default_tol(A)
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return A, np.zeros((rows, 0)), np.zeros(0), np.zeros((0, cols)), 0
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    cutoff = tol * s[0]
    rank = int(np.sum(s > cutoff)) if s[0] > 0 else 0
    return A, U, s, Vt, rank


def rank_kernel(M, tol: Optional[float] = None) -> Decomposition:
    """Numerical rank and an orthonormal basis of the null space of M"""
    A, U, s, Vt, rank = _svd(M, tol)
    cols = A.shape[1]
    if cols == 0:
        return Decomposition(rank=0, kernel_basis=np.zeros((0, 0)))
    if A.shape[0] == 0:
        return Decomposition(rank=0, kernel_basis=np.eye(cols))
    kernel = Vt[rank:].T.copy()
    return Decomposition(rank=rank, kernel_basis=kernel)


def pseudo_inverse(M, tol: Optional[float] = None) -> np.ndarray:
    """Moore-Penrose inverse with the same singular value cutoff as rank_kernel"""
    A, U, s, Vt, rank = _svd(M, tol)
    rows, cols = A.shape
    if rank == 0:
        return np.zeros((cols, rows))
    inv_s = 1.0 / s[:rank]
    return (Vt[:rank].T * inv_s) @ U[:, :rank].T


def decompose(M, tol: Optional[float] = None) -> Decomposition:
    """Rank, kernel and pseudo-inverse in one pass"""
    d = rank_kernel(M, tol)
    return Decomposition(rank=d.rank, kernel_basis=d.kernel_basis, pinv=pseudo_inverse(M, tol))


def range_basis(M, tol: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of M"""
    A, U, s, Vt, rank = _svd(M, tol)
    if rank == 0:
        return np.zeros((A.shape[0], 0))
    return U[:, :rank].copy()


def matrix_rank(M, tol: Optional[float] = None) -> int:
    return rank_kernel(M, tol).rank


def has_full_column_rank(M, tol: Optional[float] = None) -> bool:
    A = as_matrix(M)
    return rank_kernel(A, tol).rank == A.shape[1]
