"""Global mass, stiffness, weighted-mass and load assembly.

Local matrices for all cells are computed in one vectorized pass and
scattered into a CSR pattern that is computed once per space. Every matrix
assembled on a space therefore shares the same sparsity pattern, and the
scatter is a deterministic ``bincount`` independent of any threading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidSource, InvalidWeight
from .fespace import FeSpace, QuadRule, quadrature_points, quadrature_rule
from .linalg import ComplexCsr

__all__ = [
    "Pattern",
    "pattern",
    "operator_degree",
    "coefficient_degree",
    "error_degree",
    "local_mass",
    "local_stiffness",
    "local_weighted_mass",
    "scatter_matrix",
    "scatter_vector",
    "assemble_mass",
    "assemble_stiffness",
    "assemble_weighted_mass",
    "assemble_load",
]


def operator_degree(k: int) -> int:
    return 2 * k


def coefficient_degree(k: int) -> int:
    return 2 * k + 2


def error_degree(k: int) -> int:
    return 2 * k + 4


@dataclass(frozen=True)
class Pattern:
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    slot: np.ndarray        # local entry (c, a, b) flattened -> position in data

    @property
    def nnz(self) -> int:
        return self.indices.size

    def matrix(self, data) -> sp.csr_matrix:
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))


def pattern(space: FeSpace) -> Pattern:
    if "pattern" not in space._cache:
        cd = space.cell_dofs
        nloc = cd.shape[1]
        rows = np.repeat(cd, nloc, axis=1).ravel()
        cols = np.tile(cd, (1, nloc)).ravel()
        keys = rows * space.n_dofs + cols
        uniq, slot = np.unique(keys, return_inverse=True)
        urows = uniq // space.n_dofs
        indptr = np.zeros(space.n_dofs + 1, dtype=np.int64)
        np.cumsum(np.bincount(urows, minlength=space.n_dofs), out=indptr[1:])
        space._cache["pattern"] = Pattern(space.n_dofs, indptr, uniq % space.n_dofs, np.asarray(slot).ravel())
    return space._cache["pattern"]


def _rule(space, degree, default):
    return quadrature_rule(space.dim, default(space.degree) if degree is None else degree)


def _sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def local_mass(space: FeSpace, rule: QuadRule) -> np.ndarray:
    phi, _ = space.tabulate(rule)
    ref = np.einsum("q,qa,qb->ab", rule.weights, phi, phi)
    return space.dets[:, None, None] * _sym(ref)[None]


def local_stiffness(space: FeSpace, rule: QuadRule) -> np.ndarray:
    _, grads = space.tabulate(rule)
    loc = np.einsum("q,cqai,cqbi->cab", rule.weights, grads, grads, optimize=True)
    return _sym(loc) * space.dets[:, None, None]


def local_weighted_mass(space: FeSpace, rule: QuadRule, weight_values) -> np.ndarray:
    """Local ``int w phi_a phi_b`` for weights sampled at the rule's points, shape (nc, nq)."""
    key = ("pp", rule.exact_degree)
    if key not in space._cache:
        phi, _ = space.tabulate(rule)
        space._cache[key] = (rule.weights[:, None, None] * phi[:, :, None] * phi[:, None, :]).reshape(rule.n_points, -1)
    pp = space._cache[key]
    wd = weight_values * space.dets[:, None]
    nloc = space.n_local
    return _sym((wd @ pp).reshape(-1, nloc, nloc))


def scatter_matrix(space: FeSpace, local) -> np.ndarray:
    """Sum local matrices into the data array of the space's CSR pattern."""
    pat = pattern(space)
    flat = np.asarray(local).reshape(-1)
    if np.iscomplexobj(flat):
        return (np.bincount(pat.slot, weights=flat.real, minlength=pat.nnz)
                + 1j * np.bincount(pat.slot, weights=flat.imag, minlength=pat.nnz))
    return np.bincount(pat.slot, weights=flat, minlength=pat.nnz)


def scatter_vector(space: FeSpace, local) -> np.ndarray:
    idx = space.cell_dofs.ravel()
    flat = np.asarray(local).reshape(-1)
    n = space.n_dofs
    if np.iscomplexobj(flat):
        return np.bincount(idx, weights=flat.real, minlength=n) + 1j * np.bincount(idx, weights=flat.imag, minlength=n)
    return np.bincount(idx, weights=flat, minlength=n).astype(np.complex128)


def _to_csr(space, data) -> ComplexCsr:
    pat = pattern(space)
    data = np.asarray(data, dtype=np.complex128)
    return ComplexCsr(pat.n, pat.n, pat.indptr.copy(), pat.indices.copy(), data, pat.matrix(data))


def assemble_mass(space: FeSpace, degree: int | None = None) -> ComplexCsr:
    rule = _rule(space, degree, operator_degree)
    return _to_csr(space, scatter_matrix(space, local_mass(space, rule)))


def assemble_stiffness(space: FeSpace, degree: int | None = None) -> ComplexCsr:
    rule = _rule(space, degree, operator_degree)
    return _to_csr(space, scatter_matrix(space, local_stiffness(space, rule)))


def _sample_weight(space, rule, weight):
    if callable(weight):
        values = np.asarray(weight(quadrature_points(space, rule)))
    else:
        values = np.asarray(weight)
    values = np.broadcast_to(values, (space.mesh.n_cells, rule.n_points))
    if not np.all(np.isfinite(values)):
        raise InvalidWeight("weight is NaN or infinite at a quadrature point")
    return values


def assemble_weighted_mass(space: FeSpace, weight, degree: int | None = None) -> ComplexCsr:
    """Assemble ``W_ij = int w phi_i phi_j``.

    ``weight`` is either an array of shape ``(n_cells, n_points)`` sampled at
    the points of the rule of the given degree (default ``2k + 2``), a
    scalar, or a callable mapping physical points ``(n_cells, n_points, dim)``
    to such an array.
    """
    rule = _rule(space, degree, coefficient_degree)
    values = _sample_weight(space, rule, weight)
    return _to_csr(space, scatter_matrix(space, local_weighted_mass(space, rule, values)))


def assemble_load(space: FeSpace, source, t: float, degree: int | None = None) -> np.ndarray:
    """Load vector ``b_i = int f(x, t) phi_i`` for a callable ``source(x, t)``."""
    rule = _rule(space, degree, coefficient_degree)
    x = quadrature_points(space, rule)
    fx = np.broadcast_to(np.asarray(source(x, t)), x.shape[:2])
    if not np.all(np.isfinite(fx)):
        raise InvalidSource(f"source is NaN or infinite at a quadrature point (t={t})")
    phi, _ = space.tabulate(rule)
    local = ((fx * space.dets[:, None]) * rule.weights) @ phi
    return scatter_vector(space, local)
