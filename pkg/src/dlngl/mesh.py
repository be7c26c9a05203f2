"""Structured simplicial meshes of the unit square and the unit cube.

Both generators place vertices on a uniform ``(n+1)^dim`` lattice, numbered
lexicographically with the x index running fastest. Squares are split along
the lower-left to upper-right diagonal; cubes use the Kuhn subdivision into
six tetrahedra sharing the main diagonal, which gives a conforming mesh when
every cube is split the same way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "Mesh",
    "build_unit_square_mesh",
    "build_unit_cube_mesh",
    "cell_geometry",
    "boundary_facets",
    "write_mesh",
    "read_mesh",
]


@dataclass(frozen=True, eq=False)
class Mesh:
    dim: int
    vertices: np.ndarray          # (n_vertices, dim) float
    cells: np.ndarray             # (n_cells, dim + 1) int, positively oriented
    boundary_vertices: frozenset
    n: int
    h: float
    _jac: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        self.vertices.setflags(write=False)
        self.cells.setflags(write=False)
        jac = _jacobians(self.vertices, self.cells)
        det = np.linalg.det(jac)
        if np.any(det <= 0.0):
            bad = int(np.argmin(det))
            raise InvalidArgument(f"cell {bad} is degenerate or negatively oriented (det={det[bad]:.3e})")
        jac.setflags(write=False)
        object.__setattr__(self, "_jac", jac)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def jacobians(self) -> np.ndarray:
        """Per-cell affine Jacobians ``B`` with ``x = B @ xi + x0``, shape (n_cells, dim, dim)."""
        return self._jac

    @property
    def dets(self) -> np.ndarray:
        return np.linalg.det(self._jac)

    def cell_volumes(self) -> np.ndarray:
        return self.dets / float(np.prod(np.arange(1, self.dim + 1)))


def _jacobians(vertices, cells):
    x = vertices[cells]                       # (nc, d+1, d)
    return np.transpose(x[:, 1:, :] - x[:, :1, :], (0, 2, 1))


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"number of subdivisions must be a positive integer, got {n!r}")
    return int(n)


def _lattice(n, dim):
    ticks = np.linspace(0.0, 1.0, n + 1)
    grids = np.meshgrid(*([ticks] * dim), indexing="ij")
    # x fastest: reverse axes so index = i + (n+1) j (+ (n+1)^2 k)
    coords = np.stack([g.transpose(tuple(range(dim))[::-1]).ravel() for g in grids], axis=1)
    return coords


def _vid(n, *idx):
    out = 0
    for axis, i in enumerate(idx):
        out = out + i * (n + 1) ** axis
    return out


def _boundary_set(n, dim):
    ijk = np.indices((n + 1,) * dim).reshape(dim, -1)
    on = np.any((ijk == 0) | (ijk == n), axis=0)
    ids = _vid(n, *ijk)
    return frozenset(int(v) for v in ids[on])


def build_unit_square_mesh(n: int) -> Mesh:
    """Triangulate [0,1]^2 with ``2 n^2`` right triangles."""
    n = _check_n(n)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(), j.ravel()
    v00 = _vid(n, i, j)
    v10 = _vid(n, i + 1, j)
    v11 = _vid(n, i + 1, j + 1)
    v01 = _vid(n, i, j + 1)
    lower = np.stack([v00, v10, v11], axis=1)
    upper = np.stack([v00, v11, v01], axis=1)
    cells = np.stack([lower, upper], axis=1).reshape(-1, 3)
    return Mesh(2, _lattice(n, 2), cells.astype(np.int64), _boundary_set(n, 2), n, np.sqrt(2.0) / n)


def build_unit_cube_mesh(n: int) -> Mesh:
    """Kuhn-subdivide each of the ``n^3`` cubes of [0,1]^3 into six tetrahedra."""
    n = _check_n(n)
    i, j, k = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    base = np.stack([i, j, k], axis=1)
    tets = []
    for perm in itertools.permutations(range(3)):
        corner = base.copy()
        path = [_vid(n, *corner.T)]
        for axis in perm:
            corner[:, axis] += 1
            path.append(_vid(n, *corner.T))
        tet = np.stack(path, axis=1)
        if _perm_sign(perm) < 0:
            tet = tet[:, [0, 2, 1, 3]]
        tets.append(tet)
    cells = np.stack(tets, axis=1).reshape(-1, 4)
    return Mesh(3, _lattice(n, 3), cells.astype(np.int64), _boundary_set(n, 3), n, np.sqrt(3.0) / n)


def _perm_sign(perm):
    sign = 1
    p = list(perm)
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sign = -sign
    return sign


def cell_geometry(mesh: Mesh, cell_index: int):
    """Return ``(B, x0, |det B|)`` for the affine map ``xi -> B @ xi + x0`` of one cell."""
    if not 0 <= cell_index < mesh.n_cells:
        raise InvalidArgument(f"cell index {cell_index} out of range [0, {mesh.n_cells})")
    B = mesh.jacobians[cell_index]
    x0 = mesh.vertices[mesh.cells[cell_index, 0]]
    return B.copy(), x0.copy(), abs(float(np.linalg.det(B)))


def boundary_facets(mesh: Mesh):
    """Map each facet (sorted vertex tuple) to the list of cells containing it."""
    d = mesh.dim
    owners = {}
    for c, cell in enumerate(mesh.cells):
        for drop in range(d + 1):
            facet = tuple(sorted(int(v) for a, v in enumerate(cell) if a != drop))
            owners.setdefault(facet, []).append(c)
    return owners


def write_mesh(mesh: Mesh, path) -> None:
    """Dump a mesh as plain text: header ``dim n_vertices n_cells``, vertex lines, cell lines."""
    lines = [f"{mesh.dim} {mesh.n_vertices} {mesh.n_cells}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in mesh.vertices]
    lines += [" ".join(str(int(i)) for i in c) for c in mesh.cells]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path, n: int | None = None) -> Mesh:
    """Read a mesh written by :func:`write_mesh`.

    Boundary vertices are recovered from facets owned by a single cell.
    """
    rows = Path(path).read_text().split("\n")
    dim, nv, nc = (int(t) for t in rows[0].split())
    verts = np.array([[float(t) for t in rows[1 + a].split()] for a in range(nv)])
    cells = np.array([[int(t) for t in rows[1 + nv + a].split()] for a in range(nc)], dtype=np.int64)
    diam = max(
        np.linalg.norm(verts[cells[:, a]] - verts[cells[:, b]], axis=1).max()
        for a in range(dim + 1) for b in range(a + 1, dim + 1)
    )
    probe = Mesh(dim, verts, cells, frozenset(), n or 0, float(diam))
    bverts = {v for f, own in boundary_facets(probe).items() if len(own) == 1 for v in f}
    return Mesh(dim, verts, cells, frozenset(bverts), n or 0, float(diam))
