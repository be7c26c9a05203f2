"""Coupled Ginzburg-Landau problem data and the manufactured test cases.

The system solved is::

    u_t - (nu1 + i alpha1) Lap u + ((kappa1 + i beta1) f1(|u|^2) + (mu1 + i delta1) g1(|v|^2)) u - gamma1 u = s1
    v_t - (nu2 + i alpha2) Lap v + ((kappa2 + i beta2) f2(|u|^2) + (mu2 + i delta2) g2(|v|^2)) v - gamma2 v = s2

with homogeneous Dirichlet data. Manufactured sources ``s1, s2`` are
assembled from closed-form time derivatives and Laplacians of the exact
solutions, written out by hand below.

Spatial arguments ``x`` are arrays whose last axis holds the coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, UnsupportedQuery

__all__ = [
    "GlCoefficients",
    "Nonlinearity",
    "Field",
    "GlProblem",
    "make_example",
    "eval_exact",
    "eval_source",
    "source_free",
    "cubic",
    "cubic_quintic",
]


@dataclass(frozen=True)
class GlCoefficients:
    nu1: float
    alpha1: float
    kappa1: float
    beta1: float
    mu1: float
    delta1: float
    gamma1: float
    nu2: float
    alpha2: float
    kappa2: float
    beta2: float
    mu2: float
    delta2: float
    gamma2: float

    def __post_init__(self):
        for name in ("nu1", "nu2", "kappa1", "kappa2", "mu1", "mu2"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def diffusion(self):
        return complex(self.nu1, self.alpha1), complex(self.nu2, self.alpha2)

    @property
    def self_coupling(self):
        """Coefficients of f1 in the u-equation and f2 in the v-equation."""
        return complex(self.kappa1, self.beta1), complex(self.kappa2, self.beta2)

    @property
    def cross_coupling(self):
        """Coefficients of g1 in the u-equation and g2 in the v-equation."""
        return complex(self.mu1, self.delta1), complex(self.mu2, self.delta2)


@dataclass(frozen=True)
class Nonlinearity:
    f1: Callable
    f2: Callable
    g1: Callable
    g2: Callable


def cubic(s):
    return s


def cubic_quintic(s):
    return s + s * s


@dataclass(frozen=True)
class Field:
    """A closed-form space-time function with its first derivatives and Laplacian."""

    value: Callable
    grad: Callable
    dt: Callable
    lap: Callable


@dataclass(frozen=True)
class GlProblem:
    dim: int
    coefficients: GlCoefficients
    nonlinearity: Nonlinearity
    u_init: Field
    v_init: Field
    u_exact: Optional[Field] = None
    v_exact: Optional[Field] = None
    source_u: Optional[Callable] = None
    source_v: Optional[Callable] = None
    name: str = "custom"

    def u0(self, x):
        return self.u_init.value(x, 0.0)

    def v0(self, x):
        return self.v_init.value(x, 0.0)

    def weights_u(self, abs_u2, abs_v2):
        """Complex reaction weight of the u-equation for given |u|^2, |v|^2."""
        c = self.coefficients
        nl = self.nonlinearity
        return complex(c.kappa1, c.beta1) * nl.f1(abs_u2) + complex(c.mu1, c.delta1) * nl.g1(abs_v2)

    def weights_v(self, abs_u2, abs_v2):
        c = self.coefficients
        nl = self.nonlinearity
        return complex(c.kappa2, c.beta2) * nl.f2(abs_u2) + complex(c.mu2, c.delta2) * nl.g2(abs_v2)

    def residual_u(self, x, t):
        """Strong-form left-hand side of the u-equation at the exact solution."""
        u, v = self._exact_pair()
        uu, vv = u.value(x, t), v.value(x, t)
        c = self.coefficients
        return (u.dt(x, t) - complex(c.nu1, c.alpha1) * u.lap(x, t)
                + self.weights_u(np.abs(uu) ** 2, np.abs(vv) ** 2) * uu - c.gamma1 * uu)

    def residual_v(self, x, t):
        u, v = self._exact_pair()
        uu, vv = u.value(x, t), v.value(x, t)
        c = self.coefficients
        return (v.dt(x, t) - complex(c.nu2, c.alpha2) * v.lap(x, t)
                + self.weights_v(np.abs(uu) ** 2, np.abs(vv) ** 2) * vv - c.gamma2 * vv)

    def _exact_pair(self):
        if self.u_exact is None or self.v_exact is None:
            raise UnsupportedQuery(f"problem {self.name!r} has no exact solution")
        return self.u_exact, self.v_exact


# -- one-dimensional profiles -------------------------------------------------

def _sinpi(z):
    return np.sin(np.pi * z)


def _sinpi_d(z):
    return np.pi * np.cos(np.pi * z)


def _sinpi_dd(z):
    return -np.pi ** 2 * np.sin(np.pi * z)


def _p(z):
    # sin(z) (1 - z)
    return np.sin(z) * (1.0 - z)


def _p_d(z):
    return np.cos(z) * (1.0 - z) - np.sin(z)


def _p_dd(z):
    return -np.sin(z) * (1.0 - z) - 2.0 * np.cos(z)


def _q(z):
    # z (1 - z)
    return z * (1.0 - z)


def _q_d(z):
    return 1.0 - 2.0 * z


def _q_dd(z):
    return -2.0 * np.ones_like(z)


def _tensor(profiles, x):
    """Value, gradient and Laplacian of prod_j p_j(x_j)."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    vals = [profiles[j][0](x[..., j]) for j in range(d)]
    ders = [profiles[j][1](x[..., j]) for j in range(d)]
    secs = [profiles[j][2](x[..., j]) for j in range(d)]
    value = np.prod(vals, axis=0)
    grad = []
    lap = np.zeros_like(value)
    for j in range(d):
        others = np.prod([vals[i] for i in range(d) if i != j], axis=0) if d > 1 else 1.0
        grad.append(ders[j] * others)
        lap = lap + secs[j] * others
    return value, np.stack(grad, axis=-1), lap


def _separable(profiles, amp, amp_dt) -> Field:
    """Field ``amp(t) * prod_j p_j(x_j)``.

    The spatial factor is memoized for the most recent read-only point
    array, since the time loop evaluates on the same quadrature points
    every step.
    """
    last = [None, None]

    def spatial(x):
        if last[0] is x:
            return last[1]
        out = _tensor(profiles, x)
        if isinstance(x, np.ndarray) and not x.flags.writeable:
            last[0], last[1] = x, out
        return out

    def value(x, t):
        return amp(t) * spatial(x)[0]

    def grad(x, t):
        return amp(t) * spatial(x)[1]

    def dt(x, t):
        return amp_dt(t) * spatial(x)[0]

    def lap(x, t):
        return amp(t) * spatial(x)[2]

    return Field(value, grad, dt, lap)


_SINPI = (_sinpi, _sinpi_d, _sinpi_dd)
_P = (_p, _p_d, _p_dd)
_Q = (_q, _q_d, _q_dd)

_EXAMPLE1_COEFFS = GlCoefficients(
    nu1=1.0, alpha1=1.0, kappa1=1.0, beta1=1.0, mu1=1.0, delta1=1.0, gamma1=1.0,
    nu2=1.0, alpha2=1.0, kappa2=1.0, beta2=1.0, mu2=1.0, delta2=1.0, gamma2=1.0,
)

_EXAMPLE2_COEFFS = GlCoefficients(
    nu1=1.0, alpha1=2.0, kappa1=1.0, beta1=3.0, mu1=1.0, delta1=4.0, gamma1=5.0,
    nu2=5.0, alpha2=1.0, kappa2=4.0, beta2=1.0, mu2=3.0, delta2=1.0, gamma2=2.0,
)


def _example1_fields(dim):
    u = _separable([_SINPI] * dim, lambda t: 1j * np.exp(t), lambda t: 1j * np.exp(t))
    v = _separable([_P] * dim, lambda t: np.exp(1j * t * t), lambda t: 2j * t * np.exp(1j * t * t))
    return u, v


def _example2_fields():
    u = _separable(
        [_Q, _SINPI],
        lambda t: np.exp(1j * t) * (1.0 + 5.0 * t * t),
        lambda t: np.exp(1j * t) * (1j * (1.0 + 5.0 * t * t) + 10.0 * t),
    )
    v = _separable(
        [_Q, _Q],
        lambda t: (1.0 + 3.0j) * (t + 1.0) ** 2,
        lambda t: (1.0 + 3.0j) * 2.0 * (t + 1.0),
    )
    return u, v


def _manufactured(name, dim, coeffs, nonlin, u, v):
    prob = GlProblem(dim, coeffs, nonlin, u, v, u, v, name=name)
    return replace(prob, source_u=prob.residual_u, source_v=prob.residual_v)


def make_example(example_id: int) -> GlProblem:
    """Manufactured problems: 1 and 3 share coefficients (2D and 3D), 2 has quintic terms."""
    if example_id == 1:
        u, v = _example1_fields(2)
        nl = Nonlinearity(cubic, cubic, cubic, cubic)
        return _manufactured("example1", 2, _EXAMPLE1_COEFFS, nl, u, v)
    if example_id == 2:
        u, v = _example2_fields()
        nl = Nonlinearity(cubic_quintic, cubic_quintic, cubic_quintic, cubic_quintic)
        return _manufactured("example2", 2, _EXAMPLE2_COEFFS, nl, u, v)
    if example_id == 3:
        u, v = _example1_fields(3)
        nl = Nonlinearity(cubic, cubic, cubic, cubic)
        return _manufactured("example3", 3, _EXAMPLE1_COEFFS, nl, u, v)
    raise InvalidArgument(f"unknown example id {example_id!r}; expected 1, 2 or 3")


def eval_exact(problem: GlProblem, which: str, x, t, gradient: bool = False):
    field = {"u": problem.u_exact, "v": problem.v_exact}.get(which, ...)
    if field is ...:
        raise InvalidArgument(f"which must be 'u' or 'v', got {which!r}")
    if field is None:
        raise UnsupportedQuery(f"problem {problem.name!r} has no exact {which}")
    if gradient:
        return field.value(x, t), field.grad(x, t)
    return field.value(x, t)


def eval_source(problem: GlProblem, which: int, x, t):
    src = {1: problem.source_u, 2: problem.source_v}.get(which, ...)
    if src is ...:
        raise InvalidArgument(f"which must be 1 or 2, got {which!r}")
    if src is None:
        raise UnsupportedQuery(f"problem {problem.name!r} has no source {which}")
    return src(x, t)


def source_free(problem: GlProblem, gamma: float | None = None) -> GlProblem:
    """Same coefficients and initial data without sources or exact solutions.

    ``gamma`` overrides both linear growth rates when given.
    """
    coeffs = problem.coefficients
    if gamma is not None:
        coeffs = replace(coeffs, gamma1=gamma, gamma2=gamma)
    return replace(problem, coefficients=coeffs, u_exact=None, v_exact=None,
                   source_u=None, source_v=None, name=problem.name + "-source-free")
