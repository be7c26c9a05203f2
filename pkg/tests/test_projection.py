import numpy as np
import pytest

from dlngl.analysis import convergence_order, error_norms
from dlngl.assembly import assemble_mass, assemble_stiffness
from dlngl.errors import InvalidArgument
from dlngl.fespace import build_space, interpolate
from dlngl.mesh import build_unit_square_mesh
from dlngl.projection import (
    agmon_ratio,
    discrete_laplacian,
    inverse_ratio,
    l2_project,
    ritz_project,
)

PI = np.pi


def sinsin(x):
    return np.sin(PI * x[..., 0]) * np.sin(PI * x[..., 1])


def sinsin_grad(x):
    s, c = np.sin(PI * x), np.cos(PI * x)
    return np.stack([PI * c[..., 0] * s[..., 1], PI * s[..., 0] * c[..., 1]], axis=-1)


def setup(n, k):
    space = build_space(build_unit_square_mesh(n), k)
    return space, assemble_mass(space), assemble_stiffness(space)


def random_interior_function(space, rng):
    u = np.zeros(space.n_dofs, dtype=complex)
    idx = space.interior_dofs
    u[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    return u


@pytest.mark.parametrize("k", [1, 2, 3])
def test_ritz_idempotent(k):
    space, M, A = setup(4, k)
    u = random_interior_function(space, np.random.default_rng(k))
    assert np.max(np.abs(ritz_project(space, A, u) - u)) < 1e-10


def test_ritz_of_zero():
    space, M, A = setup(4, 2)
    assert np.all(ritz_project(space, A, lambda x: np.zeros(x.shape)) == 0)


def test_ritz_h1_order():
    errs, hs = [], []
    for n in (8, 16, 32):
        space, M, A = setup(n, 1)
        r = ritz_project(space, A, sinsin_grad)
        errs.append(error_norms(space, r, sinsin, sinsin_grad)[1])
        hs.append(1 / n)
    orders = convergence_order(errs, hs)[1:]
    assert all(abs(o - 1.0) < 0.1 for o in orders)


def test_l2_projection_examples():
    space, M, A = setup(3, 2)
    u = random_interior_function(space, np.random.default_rng(0)) + 0.3
    assert np.max(np.abs(l2_project(space, M, u) - u)) < 1e-10
    assert np.max(np.abs(l2_project(space, M, lambda x: np.ones(x.shape[:-1])) - 1.0)) < 1e-10
    lin = l2_project(space, M, lambda x: x[..., 0] + 1j * x[..., 1])
    ref = interpolate(space, lambda x: x[..., 0] + 1j * x[..., 1])
    assert np.max(np.abs(lin - ref)) < 1e-10


def test_discrete_laplacian_zero_and_identity():
    space, M, A = setup(4, 2)
    assert np.all(discrete_laplacian(space, M, A, np.zeros(space.n_dofs)) == 0)
    rng = np.random.default_rng(5)
    for _ in range(20):
        u = random_interior_function(space, rng)
        v = random_interior_function(space, rng)
        w = discrete_laplacian(space, M, A, u)
        lhs = -np.vdot(v, M @ w)
        rhs = np.vdot(v, A @ u)
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_discrete_laplacian_requires_zero_boundary():
    space, M, A = setup(3, 1)
    with pytest.raises(InvalidArgument):
        discrete_laplacian(space, M, A, np.ones(space.n_dofs))


def test_discrete_laplacian_eigenfunction():
    residuals = []
    for n in (8, 16, 32):
        space, M, A = setup(n, 2)
        u = ritz_project(space, A, sinsin_grad)
        w = discrete_laplacian(space, M, A, u)
        r = w + 2 * PI ** 2 * u
        residuals.append(np.sqrt(np.vdot(r, M @ r).real))
    assert residuals[0] > residuals[1] > residuals[2]
    assert residuals[2] < 1e-2


def test_agmon_and_inverse_ratios_bounded():
    rng = np.random.default_rng(11)
    agmon, inverse = [], []
    for n in (8, 16, 32):
        space, M, A = setup(n, 1)
        fns = [random_interior_function(space, rng) for _ in range(50)]
        fns.append(ritz_project(space, A, sinsin_grad))
        agmon.append(max(agmon_ratio(space, M, A, u) for u in fns))
        inverse.append(max(inverse_ratio(space, M, u) for u in fns))
    # no growth under refinement beyond a modest factor
    assert max(agmon) <= 2.0 * agmon[0]
    assert max(inverse) <= 2.0 * inverse[0]
