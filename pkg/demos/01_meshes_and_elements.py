"""
Meshes, Lagrange elements and quadrature
========================================

Builds the structured meshes, counts degrees of freedom and checks that
the simplex quadrature integrates monomials exactly.
"""

from math import factorial

import numpy as np

from dlngl import build_space, build_unit_cube_mesh, build_unit_square_mesh, quadrature_rule, reference_basis

# A unit square split into 2 n^2 triangles along the lower-left/upper-right diagonal
mesh = build_unit_square_mesh(5)
print(f"square n=5: {mesh.n_vertices} vertices, {mesh.n_cells} cells, h = {mesh.h:.4f}")
print("total area:", mesh.cell_volumes().sum())

# Kuhn split of the cube: six tetrahedra per sub-cube
cube = build_unit_cube_mesh(2)
print(f"cube n=2: {cube.n_vertices} vertices, {cube.n_cells} tets, {len(cube.boundary_vertices)} on the boundary")

# DOF counts grow like (k n + 1)^dim
for k in (1, 2, 3):
    space = build_space(mesh, k)
    print(f"P{k}: {space.n_dofs} dofs, {space.boundary_dofs.size} boundary, {space.interior_dofs.size} interior")

# The P3 basis is a partition of unity
vals, grads = reference_basis(3, 2, np.array([[0.1, 0.2], [0.3, 0.3], [0.6, 0.1]]))
print("sum of P3 basis values:", vals.sum(axis=1))
print("sum of P3 basis gradients:", np.abs(grads.sum(axis=1)).max())

# Quadrature on the reference triangle: int x^a y^b = a! b! / (a + b + 2)!
rule = quadrature_rule(2, 8)
for a, b in [(0, 0), (1, 1), (3, 5), (2, 6)]:
    approx = np.sum(rule.weights * rule.points[:, 0] ** a * rule.points[:, 1] ** b)
    exact = factorial(a) * factorial(b) / factorial(a + b + 2)
    print(f"x^{a} y^{b}: {approx:.15e} vs {exact:.15e}")
