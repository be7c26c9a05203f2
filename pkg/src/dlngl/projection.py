"""Ritz and L2 projections, the discrete Laplacian, and norm diagnostics."""

from __future__ import annotations

import numpy as np

from .assembly import coefficient_degree, scatter_vector
from .errors import InvalidArgument
from .fespace import FeSpace, fe_values, quadrature_points, quadrature_rule
from .linalg import DEFAULT_TOL, ComplexCsr, solve_sparse

__all__ = [
    "interior_block",
    "ritz_project",
    "l2_project",
    "discrete_laplacian",
    "sup_norm",
    "agmon_ratio",
    "inverse_ratio",
]


def _sp(mat):
    return mat.to_scipy() if isinstance(mat, ComplexCsr) else mat


def interior_block(space: FeSpace, mat):
    """Rows and columns of ``mat`` restricted to the interior DOFs (scipy CSR)."""
    idx = space.interior_dofs
    return _sp(mat)[idx][:, idx].tocsr()


def _gradient_load(space, grad_fn, degree):
    rule = quadrature_rule(space.dim, coefficient_degree(space.degree) if degree is None else degree)
    x = quadrature_points(space, rule)
    g = np.asarray(grad_fn(x))
    _, grads = space.tabulate(rule)
    local = np.einsum("q,cqi,cqai->ca", rule.weights, g, grads, optimize=True) * space.dets[:, None]
    return scatter_vector(space, local)


def ritz_project(space: FeSpace, A, target, tol: float = DEFAULT_TOL, degree: int | None = None):
    """Energy projection onto the space with zero boundary values.

    ``target`` is either a callable returning the gradient of the function
    at physical points (shape ``(..., dim)``), or a coefficient vector of an
    FE function, in which case its exact stiffness action is used.
    """
    A = _sp(A)
    if callable(target):
        b = _gradient_load(space, target, degree)
    else:
        b = A @ np.asarray(target, dtype=np.complex128)
    idx = space.interior_dofs
    out = np.zeros(space.n_dofs, dtype=np.complex128)
    out[idx] = solve_sparse(interior_block(space, A), b[idx], tol)
    return out


def l2_project(space: FeSpace, M, target, tol: float = DEFAULT_TOL, degree: int | None = None):
    """L2 projection over the full DOF set (no boundary constraint).

    ``target`` is a callable of physical points or an FE coefficient vector.
    """
    M = _sp(M)
    if callable(target):
        rule = quadrature_rule(space.dim, coefficient_degree(space.degree) if degree is None else degree)
        x = quadrature_points(space, rule)
        fx = np.broadcast_to(np.asarray(target(x)), x.shape[:2])
        phi, _ = space.tabulate(rule)
        b = scatter_vector(space, ((fx * space.dets[:, None]) * rule.weights) @ phi)
    else:
        b = M @ np.asarray(target, dtype=np.complex128)
    return solve_sparse(M.tocsr(), b, tol)


def discrete_laplacian(space: FeSpace, M, A, u_h, tol: float = DEFAULT_TOL):
    """``w = Lap_h u_h``, defined by ``-(w, v) = (grad u_h, grad v)`` for all ``v`` in the space."""
    u_h = np.asarray(u_h, dtype=np.complex128)
    if np.any(u_h[space.boundary_dofs] != 0):
        raise InvalidArgument("discrete Laplacian needs a function vanishing on boundary DOFs")
    idx = space.interior_dofs
    rhs = -(_sp(A) @ u_h)[idx]
    out = np.zeros(space.n_dofs, dtype=np.complex128)
    out[idx] = solve_sparse(interior_block(space, M), rhs, tol)
    return out


def sup_norm(space: FeSpace, u_h) -> float:
    """max |u_h| over the Lagrange nodes and the points of the error rule."""
    rule = quadrature_rule(space.dim, 2 * space.degree + 4)
    vals = fe_values(space, u_h, rule)
    return float(max(np.abs(u_h).max(), np.abs(vals).max()))


def _mnorm(mat, x):
    return float(np.sqrt(max(np.vdot(x, _sp(mat) @ x).real, 0.0)))


def agmon_ratio(space: FeSpace, M, A, u_h, tol: float = DEFAULT_TOL) -> float:
    """``||u_h||_inf / (||grad u_h||^(1/2) ||Lap_h u_h||^(1/2))``."""
    lap = discrete_laplacian(space, M, A, u_h, tol)
    denom = np.sqrt(_mnorm(A, u_h) * _mnorm(M, lap))
    return sup_norm(space, u_h) / denom


def inverse_ratio(space: FeSpace, M, u_h) -> float:
    """Empirical constant in ``||u_h||_inf <= C h^(-d/2) ||u_h||``."""
    return sup_norm(space, u_h) * space.mesh.h ** (space.dim / 2) / _mnorm(M, u_h)
