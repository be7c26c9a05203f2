"""Complex CSR matrices and the linear-solve contract used by the scheme.

Storage and kernels are delegated to ``scipy.sparse``; :class:`ComplexCsr`
keeps the raw compressed-row arrays visible and immutable. Solves use a
sparse LU factorization (SuperLU) followed by a residual check and, when
needed, a few steps of iterative refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, InvalidArgument, SingularMatrix, SolverFailure

__all__ = ["ComplexCsr", "csr_from_triplets", "matvec", "solve", "solve_sparse", "DEFAULT_TOL"]

DEFAULT_TOL = 1e-10
_MAX_REFINE = 3


@dataclass(frozen=True, eq=False)
class ComplexCsr:
    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _sp: sp.csr_matrix = field(default=None, repr=False)

    def __post_init__(self):
        for arr in (self.row_offsets, self.col_indices, self.values):
            arr.setflags(write=False)
        if self._sp is None:
            mat = sp.csr_matrix((self.values, self.col_indices, self.row_offsets), shape=self.shape)
            object.__setattr__(self, "_sp", mat)

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.row_offsets[-1])

    @classmethod
    def from_scipy(cls, mat) -> "ComplexCsr":
        mat = sp.csr_matrix(mat, dtype=np.complex128)
        mat.sum_duplicates()
        mat.sort_indices()
        return cls(mat.shape[0], mat.shape[1], mat.indptr.copy(), mat.indices.copy(), mat.data.copy(), mat)

    def to_scipy(self) -> sp.csr_matrix:
        """The backing scipy matrix (shared, do not mutate)."""
        return self._sp

    def to_dense(self) -> np.ndarray:
        return self._sp.toarray()

    def __matmul__(self, x):
        return matvec(self, x)


def csr_from_triplets(n_rows: int, n_cols: int, triplets) -> ComplexCsr:
    """Build a CSR matrix from ``(row, col, value)`` triplets, summing duplicates."""
    trip = list(triplets)
    if trip:
        rows = np.array([t[0] for t in trip], dtype=np.int64)
        cols = np.array([t[1] for t in trip], dtype=np.int64)
        vals = np.array([t[2] for t in trip], dtype=np.complex128)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0, dtype=np.complex128)
    if rows.size and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
        raise InvalidArgument("triplet index out of range")
    return ComplexCsr.from_scipy(sp.coo_matrix((vals, (rows, cols)), shape=(n_rows, n_cols)))


def matvec(A: ComplexCsr, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (A.n_cols,):
        raise DimensionMismatch(f"matrix has {A.n_cols} columns, vector has shape {x.shape}")
    return A.to_scipy() @ x


def solve(A: ComplexCsr, b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve ``A x = b`` to relative residual ``tol``."""
    if A.n_rows != A.n_cols:
        raise DimensionMismatch(f"matrix is not square: {A.shape}")
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (A.n_rows,):
        raise DimensionMismatch(f"right-hand side has shape {b.shape}, expected ({A.n_rows},)")
    return solve_sparse(A.to_scipy(), b, tol)


def solve_sparse(A, b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Direct solve of a scipy sparse system with a residual guarantee.

    Raises
    ------
    SingularMatrix
        The LU factorization hit an exactly zero pivot.
    SolverFailure
        The relative residual stays above ``tol`` after refinement.
    """
    if tol <= 0:
        raise InvalidArgument("tolerance must be positive")
    b = np.asarray(b, dtype=np.complex128)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    try:
        lu = spla.splu(sp.csc_matrix(A, dtype=np.complex128))
    except RuntimeError as exc:
        raise SingularMatrix(f"sparse LU failed: {exc}") from exc
    x = lu.solve(b)
    res = np.linalg.norm(b - A @ x) / bnorm
    for _ in range(_MAX_REFINE):
        if res <= tol or not np.isfinite(res):
            break
        x = x + lu.solve(b - A @ x)
        res = np.linalg.norm(b - A @ x) / bnorm
    if not np.isfinite(res) or res > tol:
        raise SolverFailure(f"relative residual {res:.3e} exceeds tolerance {tol:.1e}", residual=res)
    return x
