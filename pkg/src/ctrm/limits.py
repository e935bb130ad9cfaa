"""Limit CDFs ``G(t, x)`` (CTRM) and ``F(t, x)`` (OCTRM) and the pre-limit transforms.

Three evaluation routes:

``Inversion``
    Gaver-Stehfest inversion of the Laplace transforms in ``t``,
    ``(1/xi) psi_D(xi) / psi(xi, x)`` and ``(1/xi) (psi(xi, x) + log F_A(x)) / psi(xi, x)``.
``ClosedForm``
    Time-domain quadratures: the Beta-mixture integrals for the coupled model
    and the stable-density mixture for the uncoupled one.
``Series``
    Special functions: Mittag-Leffler for the uncoupled model, the Kummer
    function ``1F1(beta; 1; -t x**-gamma)`` and the regularised upper
    incomplete gamma ``Q(beta, t x**-gamma)`` for the coupled CTRM and OCTRM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DomainError, UnsupportedModelError
from .laplace import InversionConfig, invert, mittag_leffler, stable_density
from .model import (
    CoupledProductFrechet,
    ExponentialIndependent,
    IndependentStableFrechet,
    ModelSpec,
    check_frechet_shape,
    check_stable_index,
    cl_exponent,
    exponent_measure_tail,
)
from .process import Which

__all__ = [
    "Method",
    "LimitCdfRequest",
    "limit_cdf",
    "limit_cdf_grid",
    "limit_cdf_function",
    "limit_cdf_via_inversion",
    "limit_transform",
    "coupled_ctrm_cdf",
    "coupled_octrm_cdf",
    "coupled_ctrm_series",
    "coupled_octrm_series",
    "uncoupled_cdf",
    "prelimit_laplace_ctrm",
    "prelimit_laplace_octrm",
    "prelimit_cdf_via_inversion",
    "prelimit_cdf_exact",
]

CLAMP_SLACK = 1e-6
# Absolute disagreement tolerated between inversion orders N and N-2.
CONSISTENCY_TOL = 1e-4
# Order 14 in double precision undershoots 0 by ~1e-5 where the CDF is tiny,
# which would trip the clamp policy; order 20 keeps the error below 1e-6.
DEFAULT_INVERSION = InversionConfig(order=20, precision="extended")


class Method(str, Enum):
    INVERSION = "Inversion"
    CLOSED_FORM = "ClosedForm"
    SERIES = "Series"


@dataclass(frozen=True)
class LimitCdfRequest:
    model: ModelSpec
    which: Which
    method: Method
    t: float
    x: float

    def __post_init__(self):
        object.__setattr__(self, "which", Which(self.which))
        object.__setattr__(self, "method", Method(self.method))
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t!r}")
        if not self.x > 0:
            raise DomainError(f"x must be positive, got {self.x!r}")


def _clamp(p: float) -> float:
    if not -CLAMP_SLACK <= p <= 1.0 + CLAMP_SLACK:
        raise AccuracyError(f"inverted value {p!r} is not a probability")
    return min(max(p, 0.0), 1.0)


# -- inversion route ---------------------------------------------------------


def limit_transform(model: ModelSpec, which: Which, x: float):
    """``xi -> L(G(., x))(xi)`` or ``L(F(., x))(xi)``; accepts ``mpmath.mpf``."""
    cl = cl_exponent(model)
    if which is Which.CTRM:
        return lambda xi: cl.psi_D(xi) / (xi * cl.psi(xi, x))
    log_fa = cl.log_FA(x)
    return lambda xi: (cl.psi(xi, x) + log_fa) / (xi * cl.psi(xi, x))


def _checked_inversion(transform, t, cfg, tol):
    value = invert(transform, t, cfg)
    if tol is not None and cfg.order > 4:
        lower = InversionConfig(order=cfg.order - 2, precision=cfg.precision)
        check = invert(transform, t, lower)
        if abs(value - check) > tol:
            raise AccuracyError(
                f"inversion orders {cfg.order} and {cfg.order - 2} disagree at t={t}: {value} vs {check}"
            )
    return _clamp(value)


def limit_cdf_via_inversion(
    req: LimitCdfRequest, cfg: InversionConfig | None = None, tol: float | None = CONSISTENCY_TOL
) -> float:
    """Invert the limit transform of ``req.which`` at ``req.t``.

    The value at ``cfg.order`` is compared with order ``cfg.order - 2``; an
    absolute disagreement above ``tol`` raises :class:`AccuracyError`
    (``tol=None`` skips the check).
    """
    cfg = cfg or DEFAULT_INVERSION
    if req.x <= 0:
        return 0.0
    transform = limit_transform(req.model, req.which, req.x)
    return _checked_inversion(transform, req.t, cfg, tol)


# -- coupled model, time domain ----------------------------------------------


def _split_beta_integral(p, q, fn, epsrel):
    """``int_0^1 v**(p-1) (1-v)**(q-1) fn(v) dv`` for ``0 < p, q <= 1``.

    ``v = s**(1/p)`` on ``[0, 1/2]`` and ``1 - v = s**(1/q)`` on ``[1/2, 1]``
    cancel both endpoint singularities exactly, leaving bounded integrands.
    """

    def left(s):
        v = s ** (1.0 / p)
        return (1.0 - v) ** (q - 1.0) * fn(v) / p

    def right(s):
        w = s ** (1.0 / q)
        return (1.0 - w) ** (p - 1.0) * fn(1.0 - w) / q

    kw = dict(epsabs=1e-14, epsrel=epsrel, limit=200)
    a, _ = integrate.quad(left, 0.0, 0.5**p, **kw)
    b, _ = integrate.quad(right, 0.0, 0.5**q, **kw)
    return a + b


def _coupled_args(beta, gamma, t, x):
    beta = check_stable_index(beta)
    gamma = check_frechet_shape(gamma)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not x > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    return beta, gamma, float(t) * float(x) ** -gamma


def coupled_ctrm_cdf(beta: float, gamma: float, t: float, x: float, epsrel: float = 1e-10) -> float:
    """``G(t, x) = E[exp(-B x**-gamma)]`` with ``B ~ t * Beta(beta, 1 - beta)``."""
    beta, gamma, ct = _coupled_args(beta, gamma, t, x)
    val = _split_beta_integral(beta, 1.0 - beta, lambda v: math.exp(-ct * v), epsrel)
    return val * math.sin(math.pi * beta) / math.pi


def coupled_octrm_cdf(beta: float, gamma: float, t: float, x: float, epsrel: float = 1e-8) -> float:
    """``F(t, x)`` as the convolution of the Beta kernel with the exponent-measure tail.

    With ``u = t v`` and ``H(u) = u**beta * T(u)``, ``T`` the exponent-measure
    tail, ``F = 1/Gamma(beta) int_0^1 (1-v)**(beta-1) v**(-beta)
    exp(-c t (1-v)) H(t v) dv``, ``c = x**-gamma``.
    """
    beta, gamma, ct = _coupled_args(beta, gamma, t, x)
    model = CoupledProductFrechet(beta, gamma)

    def fn(v):
        u = t * v
        if u == 0.0:
            h = 1.0 / math.gamma(1.0 - beta)
        else:
            h = u**beta * exponent_measure_tail(model, u, x, epsrel=1e-11)
        return math.exp(-ct * (1.0 - v)) * h

    return _split_beta_integral(1.0 - beta, beta, fn, epsrel) / math.gamma(beta)


def coupled_ctrm_series(beta: float, gamma: float, t, x):
    """``G(t, x) = 1F1(beta; 1; -t x**-gamma)``; accepts arrays."""
    beta = check_stable_index(beta)
    gamma = check_frechet_shape(gamma)
    ct = np.asarray(t, dtype=float) * np.asarray(x, dtype=float) ** -gamma
    return special.hyp1f1(beta, 1.0, -ct)


def coupled_octrm_series(beta: float, gamma: float, t, x):
    """``F(t, x) = Q(beta, t x**-gamma)``, the regularised upper incomplete gamma."""
    beta = check_stable_index(beta)
    gamma = check_frechet_shape(gamma)
    ct = np.asarray(t, dtype=float) * np.asarray(x, dtype=float) ** -gamma
    return special.gammaincc(beta, ct)


# -- uncoupled model ---------------------------------------------------------


def _mixture(beta, k, t, epsrel):
    # v = t u**(-1/beta) turns the u-integral into E[exp(-k (t/D)**beta)]; w = log v.
    def integrand(w):
        # v g(v) decays like exp(-beta |w|) or faster at both ends.
        if abs(w) > 700.0:
            return 0.0
        v = math.exp(w)
        return math.exp(-k * (t / v) ** beta) * v * stable_density(beta, v)

    kw = dict(epsabs=1e-13, epsrel=epsrel, limit=200)
    pieces = [-math.inf, -5.0, 0.0, 5.0, math.inf]
    return sum(integrate.quad(integrand, lo, hi, **kw)[0] for lo, hi in zip(pieces[:-1], pieces[1:]))


def uncoupled_cdf(beta: float, alpha: float, t: float, x: float, method: Method | str = Method.SERIES) -> float:
    """Limit CDF of the uncoupled model, identical for CTRM and OCTRM.

    ``Series`` evaluates ``E_beta(-x**-alpha t**beta)``; ``Mixture`` (alias
    ``ClosedForm``) integrates the Frechet CDF against the stable density.
    """
    beta = check_stable_index(beta)
    alpha = check_frechet_shape(alpha)
    if not t > 0 or not x > 0:
        raise DomainError(f"need t > 0 and x > 0, got t={t!r}, x={x!r}")
    k = float(x) ** -alpha
    method = "Mixture" if method in ("Mixture", Method.CLOSED_FORM) else Method(method)
    if method == "Mixture":
        return min(_mixture(beta, k, float(t), 1e-10), 1.0)
    if method is Method.SERIES:
        return mittag_leffler(beta, -k * float(t) ** beta)
    raise DomainError(f"method {method!r} is not available for the uncoupled model")


# -- dispatcher --------------------------------------------------------------


def limit_cdf(req: LimitCdfRequest, cfg: InversionConfig | None = None) -> float:
    """Evaluate ``req`` by its requested route."""
    model = req.model
    if not model.has_limit:
        raise UnsupportedModelError(f"{type(model).__name__} has no scaling limit")
    if req.method is Method.INVERSION:
        return limit_cdf_via_inversion(req, cfg)
    if isinstance(model, IndependentStableFrechet):
        return uncoupled_cdf(model.beta, model.alpha, req.t, req.x, req.method)
    ctrm = req.which is Which.CTRM
    if req.method is Method.CLOSED_FORM:
        fn = coupled_ctrm_cdf if ctrm else coupled_octrm_cdf
        return fn(model.beta, model.gamma, req.t, req.x)
    fn = coupled_ctrm_series if ctrm else coupled_octrm_series
    return float(fn(model.beta, model.gamma, req.t, req.x))


def limit_cdf_grid(model, which, method, ts, xs, cfg: InversionConfig | None = None) -> np.ndarray:
    """``out[i, j] = limit_cdf(t=ts[i], x=xs[j])``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    which, method = Which(which), Method(method)
    if method is Method.SERIES:
        if isinstance(model, CoupledProductFrechet):
            fn = coupled_ctrm_series if which is Which.CTRM else coupled_octrm_series
            return np.asarray(fn(model.beta, model.gamma, ts[:, None], xs[None, :]), dtype=float)
        if isinstance(model, IndependentStableFrechet):
            z = -(xs[None, :] ** -model.alpha) * ts[:, None] ** model.beta
            return np.asarray(mittag_leffler(model.beta, z), dtype=float)
    out = np.empty((ts.size, xs.size))
    for i, t in enumerate(ts):
        for j, x in enumerate(xs):
            out[i, j] = limit_cdf(LimitCdfRequest(model, which, method, t, x), cfg)
    return out


def limit_cdf_function(model: ModelSpec, which, t: float):
    """Vectorised ``x -> P(limit <= x)`` at fixed ``t`` by the Series route.

    Accepts any real ``x`` including ``+-inf``; the CDF vanishes on ``x <= 0``.
    """
    which = Which(which)
    if not model.has_limit:
        raise UnsupportedModelError(f"{type(model).__name__} has no scaling limit")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")

    def cdf(x):
        x_arr = np.asarray(x, dtype=float)
        out = np.zeros(x_arr.shape)
        pos = x_arr > 0
        out[np.isposinf(x_arr)] = 1.0
        inner = pos & np.isfinite(x_arr)
        if np.any(inner):
            out[inner] = limit_cdf_grid(model, which, Method.SERIES, [t], x_arr[inner])[0]
        return float(out) if np.ndim(x) == 0 else out

    return cdf


# -- pre-limit transforms ----------------------------------------------------


def _require_exponential(model):
    if not isinstance(model, ExponentialIndependent):
        raise UnsupportedModelError(f"pre-limit transforms need ExponentialIndependent, got {type(model).__name__}")


def prelimit_laplace_ctrm(model: ModelSpec, xi, x):
    """``(1/xi) (1 - E[e^{-xi W}]) / (1 - E[e^{-xi W} 1{J <= x}])``."""
    _require_exponential(model)
    joint = model.joint_cl_transform(xi, x)
    return (1 - model.wait_laplace(xi)) / (xi * (1 - joint))


def prelimit_laplace_octrm(model: ModelSpec, xi, x):
    """``(1/xi) (F_J(x) - E[e^{-xi W} 1{J <= x}]) / (1 - E[e^{-xi W} 1{J <= x}])``."""
    _require_exponential(model)
    joint = model.joint_cl_transform(xi, x)
    return (model.jump_cdf(x) - joint) / (xi * (1 - joint))


def prelimit_cdf_via_inversion(
    model: ModelSpec, which, t: float, x: float, cfg: InversionConfig | None = None, tol: float | None = CONSISTENCY_TOL
) -> float:
    """``P(V(t) <= x)`` or ``P(U(t) <= x)`` by inverting the pre-limit transform."""
    _require_exponential(model)
    fn = prelimit_laplace_ctrm if Which(which) is Which.CTRM else prelimit_laplace_octrm
    return _checked_inversion(lambda xi: fn(model, xi, x), t, cfg or DEFAULT_INVERSION, tol)


def prelimit_cdf_exact(model: ModelSpec, which, t, x):
    """Poisson-maximum identities ``exp(-r t (1 - F_J))`` and ``F_J exp(-r t (1 - F_J))``."""
    _require_exponential(model)
    fj = model.jump_cdf(x)
    g = math.exp(-model.rate * t * (1.0 - fj))
    return g if Which(which) is Which.CTRM else fj * g
