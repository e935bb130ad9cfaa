"""Governing-equation checks for the limit CDFs.

Time domain: Grunwald-Letnikov approximations of the Riemann-Liouville
derivative (Laplace symbol ``xi**beta``) plugged into the fractional equations
solved by ``G`` and ``F``; the residuals must vanish at rate ``O(h)``.

Laplace domain: ``psi(xi, x) L(G)(xi) = psi_D(xi) / xi`` and
``psi(xi, x) L(F)(xi) = (psi(xi, x) + log F_A(x)) / xi`` checked with
forward transforms of tabulated CDFs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal, special

from .errors import DomainError, UnsupportedModelError
from .laplace import GridFunction, forward_transform
from .limits import coupled_ctrm_series, coupled_octrm_series, limit_cdf_grid
from .model import (
    CoupledProductFrechet,
    IndependentStableFrechet,
    ModelSpec,
    check_frechet_shape,
    check_stable_index,
    cl_exponent,
    exponent_measure_tail,
)
from .process import Which

__all__ = [
    "FractionalGrid",
    "gl_weights",
    "gl_fractional_derivative",
    "residual_uncoupled",
    "residual_coupled_ctrm",
    "residual_coupled_octrm",
    "max_residual",
    "residual_study",
    "LaplaceCheck",
    "laplace_domain_check",
]


@dataclass(frozen=True)
class FractionalGrid:
    """Uniform grid ``t_k = k h``, ``k = 1..n``; the origin ``t_0 = 0`` is implicit."""

    h: float
    n: int

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError(f"step must be positive, got {self.h!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"need n >= 2 steps, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def covering(cls, h: float, t_max: float) -> "FractionalGrid":
        return cls(h, int(math.ceil(t_max / h - 1e-9)))

    @property
    def ts(self) -> np.ndarray:
        return self.h * np.arange(1, self.n + 1)

    def tabulate(self, fn) -> GridFunction:
        ts = self.ts
        return GridFunction(ts, fn(ts))


def gl_weights(beta: float, n: int) -> np.ndarray:
    """``w_j = (-1)**j binom(beta, j)`` for ``j = 0..n`` by ``w_j = w_{j-1} (1 - (beta+1)/j)``."""
    j = np.arange(1, n + 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod(1.0 - (beta + 1.0) / j)))


def _grid_step(f: GridFunction) -> float:
    ts = f.ts
    if ts.size < 2:
        raise DomainError("need at least two grid points")
    h = ts[0]
    if not np.allclose(ts, h * np.arange(1, ts.size + 1), rtol=1e-9, atol=0.0):
        raise DomainError("gl_fractional_derivative needs the uniform grid t_k = k h")
    return float(h)


def gl_fractional_derivative(f: GridFunction, beta: float, f0: float = 0.0) -> GridFunction:
    """Grunwald-Letnikov derivative of order ``beta`` on ``t_k = k h``.

    ``(d^beta f)(t_k) ~ h**-beta sum_{j=0..k} w_j f(t_{k-j})`` with
    ``f(t_0) = f0``. First order accurate in ``h``.
    """
    if not beta > 0:
        raise DomainError(f"order must be positive, got {beta!r}")
    h = _grid_step(f)
    vals = np.concatenate(([float(f0)], f.vals))
    w = gl_weights(beta, vals.size - 1)
    conv = signal.fftconvolve(vals, w)[: vals.size] if vals.size > 512 else np.convolve(vals, w)[: vals.size]
    return GridFunction(f.ts, h**-beta * conv[1:])


def _stable_forcing(beta, ts):
    return ts**-beta / special.gamma(1.0 - beta)


def residual_uncoupled(beta: float, alpha: float, grid: FractionalGrid, x: float) -> GridFunction:
    """``d^beta F + x**-alpha F - t**-beta / Gamma(1-beta)`` with ``F = E_beta(-x**-alpha t**beta)``."""
    beta, alpha = check_stable_index(beta), check_frechet_shape(alpha)
    model = IndependentStableFrechet(beta, alpha)
    ts = grid.ts
    cdf = GridFunction(ts, limit_cdf_grid(model, Which.CTRM, "Series", ts, [x])[:, 0])
    deriv = gl_fractional_derivative(cdf, beta, f0=1.0)
    return GridFunction(ts, deriv.vals + x**-alpha * cdf.vals - _stable_forcing(beta, ts))


def _tilted_derivative(beta, c, cdf: GridFunction):
    ts = cdf.ts
    tilted = GridFunction(ts, np.exp(c * ts) * cdf.vals)
    return np.exp(-c * ts) * gl_fractional_derivative(tilted, beta, f0=1.0).vals


def residual_coupled_ctrm(beta: float, gamma: float, grid: FractionalGrid, x: float) -> GridFunction:
    """``e^{-tc} d^beta[e^{tc} G] - t**-beta / Gamma(1-beta)``, ``c = x**-gamma``."""
    beta, gamma = check_stable_index(beta), check_frechet_shape(gamma)
    ts = grid.ts
    cdf = GridFunction(ts, coupled_ctrm_series(beta, gamma, ts, x))
    lhs = _tilted_derivative(beta, x**-gamma, cdf)
    return GridFunction(ts, lhs - _stable_forcing(beta, ts))


def residual_coupled_octrm(beta: float, gamma: float, grid: FractionalGrid, x: float) -> GridFunction:
    """``e^{-tc} d^beta[e^{tc} F]`` minus the exponent-measure tail of ``(t, inf) x [0, x]``."""
    beta, gamma = check_stable_index(beta), check_frechet_shape(gamma)
    ts = grid.ts
    model = CoupledProductFrechet(beta, gamma)
    cdf = GridFunction(ts, coupled_octrm_series(beta, gamma, ts, x))
    lhs = _tilted_derivative(beta, x**-gamma, cdf)
    rhs = np.array([exponent_measure_tail(model, t, x) for t in ts])
    return GridFunction(ts, lhs - rhs)


def max_residual(res: GridFunction, t_lo: float = 0.5, t_hi: float = 2.0) -> float:
    sel = (res.ts >= t_lo - 1e-12) & (res.ts <= t_hi + 1e-12)
    return float(np.max(np.abs(res.vals[sel])))


def residual_study(model: ModelSpec, which, x: float, hs, t_lo: float = 0.5, t_hi: float = 2.0):
    """``[(h, max |residual| on [t_lo, t_hi]), ...]`` for each step in ``hs``."""
    which = Which(which)
    if isinstance(model, IndependentStableFrechet):
        fn = lambda g: residual_uncoupled(model.beta, model.alpha, g, x)  # noqa: E731
    elif isinstance(model, CoupledProductFrechet):
        base = residual_coupled_ctrm if which is Which.CTRM else residual_coupled_octrm
        fn = lambda g: base(model.beta, model.gamma, g, x)  # noqa: E731
    else:
        raise UnsupportedModelError(f"no governing equation for {type(model).__name__}")
    return [(float(h), max_residual(fn(FractionalGrid.covering(h, t_hi)), t_lo, t_hi)) for h in hs]


@dataclass(frozen=True)
class LaplaceCheck:
    xi: float
    x: float
    lhs: float
    rhs: float
    accurate: bool

    @property
    def rel_error(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def laplace_domain_check(model: ModelSpec, which, xs, xis, t_min=1e-8, t_max=400.0, n_points=20001):
    """Compare ``psi(xi, x) L(cdf)(xi)`` with its closed form on a ``(xi, x)`` grid.

    The CDF is tabulated by its Series route on a log grid of
    ``[t_min, t_max]``; the forward transform closes the tail with a
    ``t**-beta`` fit.
    """
    which = Which(which)
    cl = cl_exponent(model)
    beta = model.beta
    ts = np.logspace(math.log10(t_min), math.log10(t_max), n_points)
    out = []
    for x in xs:
        vals = limit_cdf_grid(model, which, "Series", ts, [x])[:, 0]
        f = GridFunction(ts, vals)
        for xi in xis:
            tv = forward_transform(f, xi, tail_exponent=beta)
            psi = cl.psi(xi, x)
            rhs = cl.psi_D(xi) / xi if which is Which.CTRM else (psi + cl.log_FA(x)) / xi
            out.append(LaplaceCheck(float(xi), float(x), psi * tv.value, rhs, tv.accurate))
    return out
