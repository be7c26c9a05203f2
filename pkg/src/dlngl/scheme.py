"""Semi-implicit DLN time stepping for the coupled Ginzburg-Landau system.

Each step solves two independent linear systems on the interior DOFs::

    [d0 M + w0 K] x^n = -(d1 M + w1 K) x^{n-1} - (d2 M + w2 K) x^{n-2} + b(t_{n-1+theta/2})

with ``K = (nu + i alpha) A + W - gamma M`` and ``W`` the mass matrix
weighted by the reaction coefficient frozen at the linear extrapolation
``(1 + theta/2) x^{n-1} - (theta/2) x^{n-2}`` of both fields. The first
step is a linearized Crank-Nicolson step whose reaction weights come from a
Taylor predictor at ``t = tau/2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .assembly import (
    coefficient_degree,
    local_weighted_mass,
    operator_degree,
    pattern,
    scatter_matrix,
    scatter_vector,
    local_mass,
    local_stiffness,
)
from .errors import ConfigurationError, DivergenceDetected, InvalidArgument, SolverFailure
from .fespace import FeSpace, build_space, fe_values, quadrature_points, quadrature_rule
from .linalg import DEFAULT_TOL, solve_sparse
from .mesh import build_unit_cube_mesh, build_unit_square_mesh
from .problems import GlProblem
from .projection import discrete_laplacian, ritz_project

__all__ = [
    "DlnWeights",
    "DlnConfig",
    "SchemeState",
    "Operators",
    "SimulationResult",
    "dln_weights",
    "d_tau",
    "hat",
    "tilde",
    "build_operators",
    "initial_state",
    "start_step_cn",
    "dln_step",
    "run_simulation",
]

log = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class DlnWeights:
    theta: float
    tau: float
    d: tuple
    w_hat: tuple
    w_tilde: tuple


def dln_weights(theta: float, tau: float) -> DlnWeights:
    if not 0.0 <= theta <= 1.0:
        raise InvalidArgument(f"theta must lie in [0, 1], got {theta}")
    if not tau > 0.0:
        raise InvalidArgument(f"tau must be positive, got {tau}")
    d = ((1.0 + theta) / (2.0 * tau), -2.0 * theta / (2.0 * tau), (theta - 1.0) / (2.0 * tau))
    w = ((2.0 + theta - theta ** 2) / 4.0, 2.0 * theta ** 2 / 4.0, (2.0 - theta - theta ** 2) / 4.0)
    return DlnWeights(theta, tau, d, w, (1.0 + theta / 2.0, -theta / 2.0))


# First-step (n = 1) operators are the two-level Crank-Nicolson forms.
def d_tau(seq, n: int, theta: float, tau: float):
    """Difference quotient of ``seq`` at level ``n`` (targets t_{n-1+theta/2})."""
    if n == 1:
        return (seq[1] - seq[0]) / tau
    d = dln_weights(theta, tau).d
    return d[0] * seq[n] + d[1] * seq[n - 1] + d[2] * seq[n - 2]


def hat(seq, n: int, theta: float):
    if n == 1:
        return (seq[1] + seq[0]) / 2.0
    w = dln_weights(theta, 1.0).w_hat
    return w[0] * seq[n] + w[1] * seq[n - 1] + w[2] * seq[n - 2]


def tilde(seq, n: int, theta: float):
    if n < 2:
        raise InvalidArgument("extrapolation needs two previous levels (n >= 2)")
    return (1.0 + theta / 2.0) * seq[n - 1] - (theta / 2.0) * seq[n - 2]


@dataclass(frozen=True)
class DlnConfig:
    theta: float
    tau: float
    T: float = 1.0
    tol: float = DEFAULT_TOL
    predictor: str = "analytic"

    def __post_init__(self):
        dln_weights(self.theta, self.tau)
        if not self.T > 0:
            raise InvalidArgument(f"final time must be positive, got {self.T}")
        steps = self.T / self.tau
        if abs(round(steps) * self.tau - self.T) > 1e-12:
            raise InvalidArgument(f"T={self.T} is not an integer multiple of tau={self.tau}")
        if round(steps) < 2:
            raise InvalidArgument("the two-step scheme needs at least N = 2 steps")
        if self.predictor not in ("analytic", "discrete"):
            raise InvalidArgument(f"unknown predictor {self.predictor!r}")

    @classmethod
    def from_steps(cls, theta: float, N: int, T: float = 1.0, **kw) -> "DlnConfig":
        return cls(theta=theta, tau=T / N, T=T, **kw)

    @property
    def N(self) -> int:
        return int(round(self.T / self.tau))

    @property
    def weights(self) -> DlnWeights:
        return dln_weights(self.theta, self.tau)


@dataclass
class SchemeState:
    n: int
    t: float
    u_prev: np.ndarray
    u_prev2: np.ndarray
    v_prev: np.ndarray
    v_prev2: np.ndarray


@dataclass(eq=False)
class Operators:
    """Constant matrices and precomputed maps for one FE space.

    ``M`` and ``A`` are data arrays on the space's shared CSR pattern.
    """

    space: FeSpace
    M: np.ndarray
    A: np.ndarray
    _keep: np.ndarray = field(repr=False)
    _red_indptr: np.ndarray = field(repr=False)
    _red_indices: np.ndarray = field(repr=False)

    @property
    def rule(self):
        return quadrature_rule(self.space.dim, coefficient_degree(self.space.degree))

    def full(self, data) -> sp.csr_matrix:
        return pattern(self.space).matrix(data)

    def reduced(self, data) -> sp.csr_matrix:
        n = self.space.interior_dofs.size
        return sp.csr_matrix((data[self._keep], self._red_indices, self._red_indptr), shape=(n, n))

    def mass_matrix(self) -> sp.csr_matrix:
        return self.full(self.M)

    def stiffness_matrix(self) -> sp.csr_matrix:
        return self.full(self.A)

    def weighted_mass(self, weight_values) -> np.ndarray:
        """Pattern data of the mass matrix weighted by values at the coefficient rule's points."""
        return scatter_matrix(self.space, local_weighted_mass(self.space, self.rule, weight_values))

    def values(self, coeffs) -> np.ndarray:
        return fe_values(self.space, coeffs, self.rule)

    def load(self, source, t) -> np.ndarray:
        if source is None:
            return np.zeros(self.space.n_dofs, dtype=np.complex128)
        rule = self.rule
        x = quadrature_points(self.space, rule)
        fx = np.broadcast_to(np.asarray(source(x, t)), x.shape[:2])
        if not np.all(np.isfinite(fx)):
            raise DivergenceDetected(f"source is not finite at t={t}")
        phi, _ = self.space.tabulate(rule)
        return scatter_vector(self.space, ((fx * self.space.dets[:, None]) * rule.weights) @ phi)

    def norm(self, x) -> float:
        return float(np.sqrt(max(np.vdot(x, self.mass_matrix() @ x).real, 0.0)))


def build_operators(space: FeSpace) -> Operators:
    rule = quadrature_rule(space.dim, operator_degree(space.degree))
    M = scatter_matrix(space, local_mass(space, rule))
    A = scatter_matrix(space, local_stiffness(space, rule))
    pat = pattern(space)
    rows = np.repeat(np.arange(pat.n), np.diff(pat.indptr))
    interior = np.zeros(pat.n, dtype=bool)
    interior[space.interior_dofs] = True
    new_index = np.full(pat.n, -1, dtype=np.int64)
    new_index[space.interior_dofs] = np.arange(space.interior_dofs.size)
    keep = np.flatnonzero(interior[rows] & interior[pat.indices])
    red_rows = new_index[rows[keep]]
    indptr = np.zeros(space.interior_dofs.size + 1, dtype=np.int64)
    np.cumsum(np.bincount(red_rows, minlength=space.interior_dofs.size), out=indptr[1:])
    return Operators(space, M, A, keep, indptr, new_index[pat.indices[keep]])


def _solve_two_level(ops, d, w, K, levels, b, tol, step):
    """Solve ``(d0 M + w0 K) x = -sum_j (dj M + wj K) x_j + b`` on interior DOFs."""
    M = ops.M
    rhs = b.copy()
    for dj, wj, xj in zip(d[1:], w[1:], levels):
        if dj == 0.0 and wj == 0.0:
            continue
        rhs -= ops.full(dj * M + wj * K) @ xj
    idx = ops.space.interior_dofs
    out = np.zeros(ops.space.n_dofs, dtype=np.complex128)
    try:
        out[idx] = solve_sparse(ops.reduced(d[0] * M + w[0] * K), rhs[idx], tol)
    except SolverFailure as exc:
        exc.step = step
        raise
    if not np.all(np.isfinite(out)):
        raise DivergenceDetected(f"non-finite solution at step {step}", step=step)
    return out


def _k_data(ops, diffusion, gamma, reaction_weights):
    return diffusion * ops.A + ops.weighted_mass(reaction_weights) - gamma * ops.M


def initial_state(problem: GlProblem, ops: Operators, tol: float = DEFAULT_TOL):
    """Ritz projections of the initial data."""
    A = ops.stiffness_matrix()
    u0 = ritz_project(ops.space, A, lambda x: problem.u_init.grad(x, 0.0), tol)
    v0 = ritz_project(ops.space, A, lambda x: problem.v_init.grad(x, 0.0), tol)
    return u0, v0


def _predictor_rates(problem, ops, config, u0h, v0h):
    """u_t(x, 0) and v_t(x, 0) from the PDE at the coefficient rule's points."""
    x = quadrature_points(ops.space, ops.rule)
    c = problem.coefficients
    u0 = problem.u_init.value(x, 0.0)
    v0 = problem.v_init.value(x, 0.0)
    if config.predictor == "analytic":
        if problem.u_init.lap is None or problem.v_init.lap is None:
            raise ConfigurationError("analytic predictor requires Laplacians of the initial data")
        lap_u = problem.u_init.lap(x, 0.0)
        lap_v = problem.v_init.lap(x, 0.0)
    else:
        M, A = ops.mass_matrix(), ops.stiffness_matrix()
        lap_u = ops.values(discrete_laplacian(ops.space, M, A, u0h, config.tol))
        lap_v = ops.values(discrete_laplacian(ops.space, M, A, v0h, config.tol))
    au, av = np.abs(u0) ** 2, np.abs(v0) ** 2
    du, dv = c.diffusion
    ut = du * lap_u - problem.weights_u(au, av) * u0 + c.gamma1 * u0
    vt = dv * lap_v - problem.weights_v(au, av) * v0 + c.gamma2 * v0
    if problem.source_u is not None:
        ut = ut + problem.source_u(x, 0.0)
    if problem.source_v is not None:
        vt = vt + problem.source_v(x, 0.0)
    return u0, v0, ut, vt


def start_step_cn(problem: GlProblem, ops: Operators, config: DlnConfig, u0h, v0h) -> SchemeState:
    """Linearized Crank-Nicolson step from level 0 to level 1."""
    tau = config.tau
    u0, v0, ut, vt = _predictor_rates(problem, ops, config, u0h, v0h)
    uh = u0 + 0.5 * tau * ut
    vh = v0 + 0.5 * tau * vt
    au, av = np.abs(uh) ** 2, np.abs(vh) ** 2
    c = problem.coefficients
    du, dv = c.diffusion
    d = (1.0 / tau, -1.0 / tau)
    w = (0.5, 0.5)
    t_mid = 0.5 * tau
    Ku = _k_data(ops, du, c.gamma1, problem.weights_u(au, av))
    Kv = _k_data(ops, dv, c.gamma2, problem.weights_v(au, av))
    u1 = _solve_two_level(ops, d, w, Ku, [u0h], ops.load(problem.source_u, t_mid), config.tol, 1)
    v1 = _solve_two_level(ops, d, w, Kv, [v0h], ops.load(problem.source_v, t_mid), config.tol, 1)
    return SchemeState(1, tau, u1, u0h, v1, v0h)


def dln_step(state: SchemeState, problem: GlProblem, ops: Operators, weights: DlnWeights,
             b_u=None, b_v=None, tol: float = DEFAULT_TOL) -> SchemeState:
    """Advance from levels (n-1, n-2) to level n.

    ``b_u``, ``b_v`` are load vectors at ``t_{n-1+theta/2}``; ``None`` means zero.
    """
    n = state.n + 1
    e0, e1 = weights.w_tilde
    u_ext = ops.values(e0 * state.u_prev + e1 * state.u_prev2)
    v_ext = ops.values(e0 * state.v_prev + e1 * state.v_prev2)
    au, av = np.abs(u_ext) ** 2, np.abs(v_ext) ** 2
    c = problem.coefficients
    du, dv = c.diffusion
    Ku = _k_data(ops, du, c.gamma1, problem.weights_u(au, av))
    Kv = _k_data(ops, dv, c.gamma2, problem.weights_v(au, av))
    zero = np.zeros(ops.space.n_dofs, dtype=np.complex128)
    un = _solve_two_level(ops, weights.d, weights.w_hat, Ku, [state.u_prev, state.u_prev2],
                          zero if b_u is None else b_u, tol, n)
    vn = _solve_two_level(ops, weights.d, weights.w_hat, Kv, [state.v_prev, state.v_prev2],
                          zero if b_v is None else b_v, tol, n)
    return SchemeState(n, n * weights.tau, un, state.u_prev, vn, state.v_prev)


@dataclass
class SimulationResult:
    problem: GlProblem
    config: DlnConfig
    ops: Operators
    u: np.ndarray
    v: np.ndarray
    u0: np.ndarray
    v0: np.ndarray
    norms_u: np.ndarray
    norms_v: np.ndarray

    @property
    def space(self) -> FeSpace:
        return self.ops.space

    @property
    def t(self) -> float:
        return self.config.T


def make_space(dim: int, n: int, k: int) -> FeSpace:
    mesh = build_unit_square_mesh(n) if dim == 2 else build_unit_cube_mesh(n)
    return build_space(mesh, k)


def run_simulation(problem: GlProblem, config: DlnConfig, n: int, k: int,
                   ops: Optional[Operators] = None) -> SimulationResult:
    """Ritz initialization, one Crank-Nicolson step, then N-1 DLN steps.

    Raises
    ------
    SolverFailure
        A linear solve failed; ``step`` identifies the time level.
    DivergenceDetected
        The L2 norm exceeded ``1e6 (1 + ||x_h^0||)`` or became non-finite.
    """
    if ops is None:
        ops = build_operators(make_space(problem.dim, n, k))
    u0h, v0h = initial_state(problem, ops, config.tol)
    N = config.N
    norms_u = np.empty(N + 1)
    norms_v = np.empty(N + 1)
    norms_u[0], norms_v[0] = ops.norm(u0h), ops.norm(v0h)
    cap_u = DIVERGENCE_FACTOR * (1.0 + norms_u[0])
    cap_v = DIVERGENCE_FACTOR * (1.0 + norms_v[0])

    def record(state):
        nu_, nv_ = ops.norm(state.u_prev), ops.norm(state.v_prev)
        if not (math.isfinite(nu_) and math.isfinite(nv_)) or nu_ > cap_u or nv_ > cap_v:
            raise DivergenceDetected(f"solution norm blew up at step {state.n} (|u|={nu_:.3e}, |v|={nv_:.3e})",
                                     step=state.n)
        norms_u[state.n], norms_v[state.n] = nu_, nv_

    state = start_step_cn(problem, ops, config, u0h, v0h)
    record(state)
    weights = config.weights
    for step in range(2, N + 1):
        t_eval = (step - 1 + weights.theta / 2.0) * config.tau
        b_u = ops.load(problem.source_u, t_eval) if problem.source_u is not None else None
        b_v = ops.load(problem.source_v, t_eval) if problem.source_v is not None else None
        state = dln_step(state, problem, ops, weights, b_u, b_v, config.tol)
        record(state)
    log.debug("finished %s: n=%d k=%d N=%d", problem.name, n, k, N)
    return SimulationResult(problem, config, ops, state.u_prev, state.v_prev, u0h, v0h, norms_u, norms_v)
