"""Lagrange elements on simplices, simplex quadrature and global DOF maps.

Local basis functions are built from barycentric coordinates with
Silvester's product formula, so every degree and dimension shares one code
path. Quadrature rules are conical (collapsed) products of Gauss-Jacobi
rules, exact to any requested polynomial degree with positive weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import DimensionMismatch, InvalidArgument, UnsupportedDegree
from .mesh import Mesh

__all__ = [
    "QuadRule",
    "FeSpace",
    "SUPPORTED_DEGREES",
    "MAX_QUAD_DEGREE",
    "lattice_multi_indices",
    "reference_nodes",
    "reference_basis",
    "quadrature_rule",
    "build_space",
    "eval_fe_function",
    "interpolate",
    "quadrature_points",
    "fe_values",
]

SUPPORTED_DEGREES = {2: (1, 2, 3), 3: (1, 2)}
MAX_QUAD_DEGREE = 20


def _check_degree(k, dim):
    if dim not in SUPPORTED_DEGREES or k not in SUPPORTED_DEGREES[dim]:
        raise UnsupportedDegree(f"P{k} elements are not available in {dim}D")


@lru_cache(maxsize=None)
def lattice_multi_indices(k: int, dim: int) -> np.ndarray:
    """Barycentric multi-indices of the P_k nodes, shape (n_local, dim + 1).

    Order: vertices first (in reference-vertex order), then edge, face and
    interior nodes, each group sorted lexicographically.
    """
    alphas = [a for a in itertools.product(range(k + 1), repeat=dim + 1) if sum(a) == k]

    def rank(a):
        support = sum(1 for x in a if x)
        vertex = a.index(k) if support == 1 else 0
        return (support, vertex, tuple(-x for x in a))

    out = np.array(sorted(alphas, key=rank), dtype=np.int64)
    out.setflags(write=False)
    return out


def reference_nodes(k: int, dim: int) -> np.ndarray:
    """Reference coordinates of the equispaced Lagrange nodes."""
    _check_degree(k, dim)
    return lattice_multi_indices(k, dim)[:, 1:] / k


def _barycentric(xi):
    xi = np.asarray(xi, dtype=float)
    return np.concatenate([1.0 - xi.sum(axis=-1, keepdims=True), xi], axis=-1)


def _silvester(k, lam):
    """Values and barycentric derivatives of the factors R_a(lam_i) = prod_{j<a} (k lam - j)/(j+1).

    Returns arrays indexed [point, a, i] for a = 0..k.
    """
    npt, nb = lam.shape
    val = np.ones((npt, k + 1, nb))
    der = np.zeros((npt, k + 1, nb))
    for a in range(1, k + 1):
        fac = (k * lam - (a - 1)) / a
        der[:, a] = der[:, a - 1] * fac + val[:, a - 1] * (k / a)
        val[:, a] = val[:, a - 1] * fac
    return val, der


def _tabulate(k, dim, xi):
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    lam = _barycentric(xi)
    alpha = lattice_multi_indices(k, dim)
    val, der = _silvester(k, lam)
    cols = np.arange(dim + 1)
    fac = val[:, alpha, cols]                      # (npt, nloc, dim+1)
    dfac = der[:, alpha, cols]
    phi = fac.prod(axis=-1)
    dphi_dlam = np.empty_like(fac)
    for i in range(dim + 1):
        others = np.delete(fac, i, axis=-1).prod(axis=-1)
        dphi_dlam[..., i] = dfac[..., i] * others
    # d lam_0 / d xi_j = -1, d lam_{j+1} / d xi_j = 1
    dphi = dphi_dlam[..., 1:] - dphi_dlam[..., :1]
    return phi, dphi


def reference_basis(k: int, dim: int, point):
    """Evaluate the local P_k basis at reference point(s).

    Parameters
    ----------
    k, dim : int
        Polynomial degree and spatial dimension.
    point : array_like
        One point of shape ``(dim,)`` or a batch of shape ``(npt, dim)``.

    Returns
    -------
    values : ndarray, shape (n_local,) or (npt, n_local)
    gradients : ndarray, shape (n_local, dim) or (npt, n_local, dim)
    """
    _check_degree(k, dim)
    p = np.asarray(point, dtype=float)
    if p.shape[-1] != dim:
        raise DimensionMismatch(f"reference point has {p.shape[-1]} coordinates, expected {dim}")
    phi, dphi = _tabulate(k, dim, p.reshape(-1, dim))
    if p.ndim == 1:
        return phi[0], dphi[0]
    return phi, dphi


@dataclass(frozen=True, eq=False)
class QuadRule:
    dim: int
    points: np.ndarray      # (nq, dim) reference coordinates
    weights: np.ndarray     # (nq,), sum = 1/dim!
    exact_degree: int

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def _gauss_jacobi01(m, a):
    """m-point rule on [0,1] for the weight (1-s)^a."""
    x, w = roots_jacobi(m, a, 0.0)
    return (1.0 + x) / 2.0, w / 2.0 ** (a + 1)


@lru_cache(maxsize=None)
def _conical_rule(dim, degree):
    m = max(1, math.ceil((degree + 1) / 2))
    factors = [_gauss_jacobi01(m, dim - 1 - axis) for axis in range(dim)]
    pts, wts = [], []
    for idx in itertools.product(range(m), repeat=dim):
        s = [factors[a][0][i] for a, i in enumerate(idx)]
        w = math.prod(factors[a][1][i] for a, i in enumerate(idx))
        xi, scale = [], 1.0
        for a in range(dim):
            xi.append(s[a] * scale)
            scale *= 1.0 - s[a]
        pts.append(xi)
        wts.append(w)
    points = np.array(pts)
    weights = np.array(wts)
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(dim, points, weights, 2 * m - 1)


def quadrature_rule(dim: int, required_degree: int) -> QuadRule:
    """Positive-weight rule on the reference simplex exact up to ``required_degree``."""
    if dim not in (2, 3):
        raise InvalidArgument(f"quadrature is available in 2D and 3D, got dim={dim}")
    if required_degree < 0 or required_degree > MAX_QUAD_DEGREE:
        raise UnsupportedDegree(f"no quadrature rule of degree {required_degree} (max {MAX_QUAD_DEGREE})")
    return _conical_rule(dim, int(required_degree))


@dataclass(frozen=True, eq=False)
class FeSpace:
    """Continuous P_k space over a mesh.

    ``cell_dofs[c, a]`` is the global index of local node ``a`` of cell ``c``;
    local nodes follow :func:`lattice_multi_indices`.
    """

    mesh: Mesh
    degree: int
    dof_coords: np.ndarray
    cell_dofs: np.ndarray
    boundary_dofs: np.ndarray
    interior_dofs: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @property
    def n_dofs(self) -> int:
        return self.dof_coords.shape[0]

    @property
    def n_local(self) -> int:
        return self.cell_dofs.shape[1]

    @property
    def inv_jac_t(self) -> np.ndarray:
        """Per-cell ``B^{-T}``, mapping reference gradients to physical ones."""
        if "invjt" not in self._cache:
            self._cache["invjt"] = np.transpose(np.linalg.inv(self.mesh.jacobians), (0, 2, 1))
        return self._cache["invjt"]

    @property
    def dets(self) -> np.ndarray:
        if "dets" not in self._cache:
            self._cache["dets"] = np.abs(self.mesh.dets)
        return self._cache["dets"]

    def tabulate(self, rule: QuadRule):
        """Basis values (nq, nloc) and physical gradients (nc, nq, nloc, dim) at a rule's points."""
        key = ("tab", rule.exact_degree)
        if key not in self._cache:
            phi, dphi = _tabulate(self.degree, self.dim, rule.points)
            grads = np.einsum("cij,qaj->cqai", self.inv_jac_t, dphi, optimize=True)
            self._cache[key] = (phi, grads)
        return self._cache[key]


def build_space(mesh: Mesh, k: int) -> FeSpace:
    """Enumerate global P_k DOFs on ``mesh``.

    Nodes are numbered lexicographically by coordinate with x varying
    fastest, so for k = 1 the DOF numbering matches the vertex numbering.
    """
    _check_degree(k, mesh.dim)
    alpha = lattice_multi_indices(k, mesh.dim)
    corners = mesh.vertices[mesh.cells]                           # (nc, d+1, d)
    local = np.einsum("ab,cbj->caj", alpha / k, corners)          # (nc, nloc, d)
    flat = local.reshape(-1, mesh.dim)
    scale = k * mesh.n if mesh.n else 2 ** 30
    keys = np.rint(flat * scale).astype(np.int64)
    uniq, inverse = np.unique(keys[:, ::-1], axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    cell_dofs = inverse.reshape(mesh.n_cells, -1)
    coords = np.zeros((uniq.shape[0], mesh.dim))
    coords[inverse] = flat

    bmask = np.zeros(uniq.shape[0], dtype=bool)
    for a, cells_on in _boundary_local_facets(mesh):
        on_facet = alpha[:, a] == 0
        bmask[cell_dofs[np.ix_(cells_on, np.flatnonzero(on_facet))].ravel()] = True

    for arr in (coords, cell_dofs):
        arr.setflags(write=False)
    return FeSpace(
        mesh=mesh,
        degree=k,
        dof_coords=coords,
        cell_dofs=cell_dofs,
        boundary_dofs=np.flatnonzero(bmask),
        interior_dofs=np.flatnonzero(~bmask),
    )


def _boundary_local_facets(mesh):
    """Yield (local facet index a, cells whose facet opposite vertex a lies on the boundary)."""
    d = mesh.dim
    facets = []
    for a in range(d + 1):
        keep = [b for b in range(d + 1) if b != a]
        facets.append(np.sort(mesh.cells[:, keep], axis=1))
    allf = np.concatenate(facets)
    _, inv, counts = np.unique(allf, axis=0, return_inverse=True, return_counts=True)
    single = (counts[np.asarray(inv).reshape(-1)] == 1).reshape(d + 1, mesh.n_cells)
    for a in range(d + 1):
        yield a, np.flatnonzero(single[a])


def _check_coeffs(space, coeffs):
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (space.n_dofs,):
        raise DimensionMismatch(f"coefficient vector has shape {coeffs.shape}, expected ({space.n_dofs},)")
    return coeffs


def eval_fe_function(space: FeSpace, coeffs, cell: int, point):
    """Value and physical gradient of an FE function at a reference point of one cell."""
    coeffs = _check_coeffs(space, coeffs)
    if not 0 <= cell < space.mesh.n_cells:
        raise InvalidArgument(f"cell index {cell} out of range")
    phi, dphi = reference_basis(space.degree, space.dim, np.asarray(point, dtype=float))
    local = coeffs[space.cell_dofs[cell]]
    grad_ref = dphi.T @ local
    return complex(phi @ local), space.inv_jac_t[cell] @ grad_ref


def interpolate(space: FeSpace, func) -> np.ndarray:
    """Nodal interpolant: ``func`` is evaluated on all DOF coordinates at once."""
    vals = np.asarray(func(space.dof_coords))
    return np.broadcast_to(vals, (space.n_dofs,)).copy()


def quadrature_points(space: FeSpace, rule: QuadRule) -> np.ndarray:
    """Physical coordinates of the rule's points in every cell, shape (nc, nq, dim)."""
    key = ("qp", rule.exact_degree)
    if key not in space._cache:
        x0 = space.mesh.vertices[space.mesh.cells[:, 0]]
        pts = x0[:, None, :] + np.einsum("cij,qj->cqi", space.mesh.jacobians, rule.points)
        pts.setflags(write=False)
        space._cache[key] = pts
    return space._cache[key]


def fe_values(space: FeSpace, coeffs, rule: QuadRule, gradients: bool = False):
    """Evaluate an FE function at every quadrature point: (nc, nq) [and (nc, nq, dim)]."""
    coeffs = _check_coeffs(space, coeffs)
    phi, grads = space.tabulate(rule)
    local = coeffs[space.cell_dofs]                  # (nc, nloc)
    vals = local @ phi.T
    if not gradients:
        return vals
    return vals, np.einsum("ca,cqai->cqi", local, grads, optimize=True)
