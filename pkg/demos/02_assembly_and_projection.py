"""
Assembly, Ritz projection and the discrete Laplacian
====================================================

Assembles mass and stiffness matrices, projects sin(pi x) sin(pi y) in
the energy inner product and watches the discrete Laplacian approach the
continuous eigenvalue -2 pi^2.
"""

import numpy as np

from dlngl import (
    assemble_mass,
    assemble_stiffness,
    build_space,
    build_unit_square_mesh,
    convergence_order,
    discrete_laplacian,
    error_norms,
    interpolate,
    ritz_project,
)

PI = np.pi


def u(x):
    return np.sin(PI * x[..., 0]) * np.sin(PI * x[..., 1])


def grad_u(x):
    s, c = np.sin(PI * x), np.cos(PI * x)
    return np.stack([PI * c[..., 0] * s[..., 1], PI * s[..., 0] * c[..., 1]], axis=-1)


# The Dirichlet energy of the interpolant approximates pi^2 / 2
space = build_space(build_unit_square_mesh(20), 1)
x = interpolate(space, u)
print("energy:", np.vdot(x, assemble_stiffness(space) @ x).real, "exact:", PI ** 2 / 2)

# Ritz projection errors: H1 order k, L2 order k + 1
for k in (1, 2):
    ns = [8, 16, 32]
    l2, h1 = [], []
    for n in ns:
        sp = build_space(build_unit_square_mesh(n), k)
        r = ritz_project(sp, assemble_stiffness(sp), grad_u)
        e0, e1 = error_norms(sp, r, u, grad_u)
        l2.append(e0)
        h1.append(e1)
    hs = [1 / n for n in ns]
    print(f"k={k}: L2 orders {convergence_order(l2, hs)[1:]}, H1 orders {convergence_order(h1, hs)[1:]}")

# Discrete Laplacian of the projected eigenfunction
for n in (8, 16, 32):
    sp = build_space(build_unit_square_mesh(n), 2)
    M, A = assemble_mass(sp), assemble_stiffness(sp)
    r = ritz_project(sp, A, grad_u)
    w = discrete_laplacian(sp, M, A, r)
    res = w + 2 * PI ** 2 * r
    print(f"n={n}: ||Lap_h u_h + 2 pi^2 u_h|| = {np.sqrt(np.vdot(res, M @ res).real):.3e}")
