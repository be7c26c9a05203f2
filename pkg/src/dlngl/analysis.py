"""Error norms, observed convergence orders and the algebraic identity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .assembly import error_degree
from .errors import InvalidArgument
from .fespace import FeSpace, fe_values, quadrature_points, quadrature_rule
from .scheme import SimulationResult, dln_weights, hat

__all__ = [
    "ErrorReport",
    "RateRow",
    "RateTable",
    "error_norms",
    "error_report",
    "convergence_order",
    "build_rate_table",
    "check_g_stability_identity",
    "check_transfer_inequality",
]


def error_norms(space: FeSpace, u_h, exact_value, exact_grad, degree: Optional[int] = None):
    """L2 and H1-seminorm distances between an FE function and a closed-form one.

    ``exact_value(x)`` and ``exact_grad(x)`` take physical points with the
    coordinate on the last axis.
    """
    rule = quadrature_rule(space.dim, error_degree(space.degree) if degree is None else degree)
    x = quadrature_points(space, rule)
    vals, grads = fe_values(space, u_h, rule, gradients=True)
    ev = np.broadcast_to(np.asarray(exact_value(x)), vals.shape)
    eg = np.broadcast_to(np.asarray(exact_grad(x)), grads.shape)
    wd = space.dets[:, None] * rule.weights[None, :]
    l2 = np.sum(wd * np.abs(ev - vals) ** 2)
    h1 = np.sum(wd * np.sum(np.abs(eg - grads) ** 2, axis=-1))
    return float(np.sqrt(l2)), float(np.sqrt(h1))


@dataclass(frozen=True)
class ErrorReport:
    E0_u: float
    E1_u: float
    E0_v: float
    E1_v: float


def error_report(result: SimulationResult, degree: Optional[int] = None) -> ErrorReport:
    """Final-time errors of a simulation against the problem's exact solutions."""
    p, t = result.problem, result.config.T
    if p.u_exact is None or p.v_exact is None:
        raise InvalidArgument(f"problem {p.name!r} has no exact solution")
    e0u, e1u = error_norms(result.space, result.u, lambda x: p.u_exact.value(x, t),
                           lambda x: p.u_exact.grad(x, t), degree)
    e0v, e1v = error_norms(result.space, result.v, lambda x: p.v_exact.value(x, t),
                           lambda x: p.v_exact.grad(x, t), degree)
    return ErrorReport(e0u, e1u, e0v, e1v)


def convergence_order(errors: Sequence[float], params: Sequence[float]) -> list:
    """Successive orders ``log(e_{i-1}/e_i) / log(m_{i-1}/m_i)``; the first entry is ``None``.

    Rows where either error is non-positive get ``None``.
    """
    if len(errors) != len(params):
        raise InvalidArgument("errors and parameters must have equal length")
    if len(errors) < 1:
        raise InvalidArgument("need at least one row")
    out = [None]
    for i in range(1, len(errors)):
        e_prev, e = errors[i - 1], errors[i]
        if e_prev <= 0 or e <= 0 or params[i - 1] == params[i]:
            out.append(None)
        else:
            out.append(math.log(e_prev / e) / math.log(params[i - 1] / params[i]))
    return out


@dataclass
class RateRow:
    param: float
    report: ErrorReport
    orders: dict = field(default_factory=dict)


@dataclass
class RateTable:
    """Rows of errors and orders, laid out like the published tables."""

    rows: list
    label: str = "h"
    COLUMNS = ("E1_u", "E0_u", "E1_v", "E0_v")

    def errors(self, column: str) -> list:
        return [getattr(r.report, column) for r in self.rows]

    def orders(self, column: str) -> list:
        return [r.orders.get(column) for r in self.rows]

    @property
    def params(self) -> list:
        return [r.param for r in self.rows]


def build_rate_table(params, reports, label: str = "h") -> RateTable:
    rows = [RateRow(p, r) for p, r in zip(params, reports)]
    table = RateTable(rows, label)
    for col in RateTable.COLUMNS:
        for row, order in zip(rows, convergence_order(table.errors(col), params)):
            row.orders[col] = order
    return table


def _inner(M, a, b):
    return np.vdot(b, M @ a)         # (a, b) = b^H M a


def check_g_stability_identity(theta, tau, v0, v1, v2, M=None):
    """Both sides of the G-stability identity for three consecutive levels.

    ``Re(D v^2, hat v^2) = (G^2 - G^1)/(4 tau) + theta (1 - theta^2)/(8 tau) ||v^2 - 2 v^1 + v^0||^2``
    with ``G^n = (1 + theta)||v^n||^2 + (1 - theta)||v^{n-1}||^2``, in the
    inner product induced by ``M`` (identity when ``None``).

    Returns ``(lhs, rhs, |lhs - rhs|)``.
    """
    v0, v1, v2 = (np.atleast_1d(np.asarray(v, dtype=np.complex128)) for v in (v0, v1, v2))
    if M is None:
        M = np.eye(v0.size)
    w = dln_weights(theta, tau)
    seq = [v0, v1, v2]
    dv = w.d[0] * v2 + w.d[1] * v1 + w.d[2] * v0
    hv = hat(seq, 2, theta)
    lhs = _inner(M, dv, hv).real

    def sq(x):
        return _inner(M, x, x).real

    G2 = (1 + theta) * sq(v2) + (1 - theta) * sq(v1)
    G1 = (1 + theta) * sq(v1) + (1 - theta) * sq(v0)
    rhs = (G2 - G1) / (4 * tau) + theta * (1 - theta ** 2) / (8 * tau) * sq(v2 - 2 * v1 + v0)
    return float(lhs), float(rhs), float(abs(lhs - rhs))


def check_transfer_inequality(theta, seq, M=None):
    """Check ``||v^n|| <= 2 sum_{k=1}^n ||hat v^k|| + ||v^0||`` for every n >= 1.

    Returns ``(holds, min_slack)`` where slack is right minus left side.
    """
    seq = [np.atleast_1d(np.asarray(v, dtype=np.complex128)) for v in seq]
    if len(seq) < 2:
        raise InvalidArgument("need at least two levels")
    dln_weights(theta, 1.0)
    if M is None:
        M = np.eye(seq[0].size)

    def norm(x):
        return math.sqrt(max(_inner(M, x, x).real, 0.0))

    base = norm(seq[0])
    acc = 0.0
    slack = math.inf
    for n in range(1, len(seq)):
        acc += norm(hat(seq, n, theta))
        slack = min(slack, 2 * acc + base - norm(seq[n]))
    return slack >= -1e-12, slack
