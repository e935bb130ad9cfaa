"""Density and CDF of the one-sided stable law with ``E[exp(-s D)] = exp(-s**beta)``."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize, special

from ..errors import DomainError
from ..model import check_stable_index
from ..rng import kanter_factor

__all__ = ["stable_density", "stable_cdf"]

_LEVY_NORM = 1.0 / (2.0 * math.sqrt(math.pi))


def _log_kanter(beta, u):
    return float(np.log(kanter_factor(beta, u)))


def _log_kanter_reflected(beta, d):
    """``log A(pi - d)`` without forming ``pi - d`` (keeps precision as ``d -> 0``)."""
    q = 1.0 - beta
    return (beta / q) * math.log(math.sin(beta * (math.pi - d))) + math.log(math.sin(q * (math.pi - d))) - math.log(math.sin(d)) / q


def _root(fn, lo, hi):
    """Root of an increasing ``fn`` on ``[lo, hi]``, clipped to the ends."""
    if fn(lo) >= 0.0:
        return lo
    if fn(hi) <= 0.0:
        return hi
    return optimize.brentq(fn, lo, hi, xtol=1e-14, rtol=1e-13)


_V_MIN = -700.0


def _kanter_integral(beta, x, weight_by_a):
    """``1/pi int_0^pi w(u) exp(-A(u) s) du`` with ``w = A s`` or ``w = 1``."""
    # P(D <= x) = 1/pi int_0^pi exp(-A(u) s) du with s = x**(-beta/(1-beta)).
    # A increases from A(0+) to infinity at pi, and the mass sits where
    # A(u) s = O(1); that spot can be extremely close to pi, so [pi/2, pi) is
    # integrated in v = log(pi - u). The range is cut where A(u) s exceeds
    # A(0+) s + 50.
    log_s = -beta / (1.0 - beta) * math.log(x)
    if log_s > 700.0:
        # exp(-A(0) s) underflows: no mass below x.
        return 0.0
    base = math.exp(_log_kanter(beta, 1e-12) + log_s)
    log_knee = math.log(max(1.0, base + 1.0)) - log_s
    log_top = math.log(base + 50.0) - log_s

    def f_u(u):
        # Log space: s is subnormal for very large x.
        log_as = _log_kanter(beta, u) + log_s
        a_s = math.exp(log_as)
        return math.exp(log_as - a_s) if weight_by_a else math.exp(-a_s)

    def f_v(v):
        log_a = _log_kanter_reflected(beta, math.exp(v))
        if log_a + log_s > 700.0:
            return 0.0
        a_s = math.exp(log_a + log_s)
        # d * A s * exp(-A s) (or d * exp(-A s)) assembled in log space.
        return math.exp(v - a_s + (log_a + log_s if weight_by_a else 0.0))

    half = 0.5 * math.pi
    kw = dict(epsabs=0.0, epsrel=1e-11, limit=200)
    u_top = _root(lambda u: _log_kanter(beta, u) - log_top, 1e-12, half)
    u_knee = _root(lambda u: _log_kanter(beta, u) - log_knee, 1e-12, half)
    pts = [u_knee] if 1e-12 < u_knee < u_top else None
    val, _ = integrate.quad(f_u, 0.0, u_top, points=pts, **kw)
    if u_top >= half:
        # log A(pi - e^v) decreases in v.
        v_half = math.log(half)
        v_top = _root(lambda v: log_top - _log_kanter_reflected(beta, math.exp(v)), _V_MIN, v_half)
        v_knee = _root(lambda v: log_knee - _log_kanter_reflected(beta, math.exp(v)), _V_MIN, v_half)
        pts = [v_knee] if v_top < v_knee < v_half else None
        val += integrate.quad(f_v, v_top, v_half, points=pts, **kw)[0]
    return val / math.pi


def _zolotarev_density(beta, x):
    # d/dx exp(-A s) = A s * beta/((1-beta) x) * exp(-A s)
    return beta / (1.0 - beta) / x * _kanter_integral(beta, x, weight_by_a=True)


def stable_density(beta: float, t, method: str = "auto"):
    """Density ``g_beta(t)`` of the one-sided stable law.

    ``method="auto"`` uses the Levy closed form when ``beta == 0.5`` and the
    Zolotarev-Kanter single integral otherwise; ``"zolotarev"`` forces the
    integral, ``"closed"`` requires ``beta == 0.5``.
    """
    beta = check_stable_index(beta)
    if method not in ("auto", "zolotarev", "closed"):
        raise DomainError(f"unknown method {method!r}")
    if method == "closed" and beta != 0.5:
        raise DomainError("closed form only exists for beta = 0.5")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("stable_density needs t > 0")
    if beta == 0.5 and method != "zolotarev":
        out = _LEVY_NORM * t_arr**-1.5 * np.exp(-0.25 / t_arr)
    else:
        out = np.vectorize(lambda x: _zolotarev_density(beta, x), otypes=[float])(t_arr)
    return float(out) if np.ndim(t) == 0 else out


def stable_cdf(beta: float, t):
    """``P(D <= t)``; ``erfc(1/(2 sqrt t))`` for ``beta = 0.5``."""
    beta = check_stable_index(beta)
    t_arr = np.asarray(t, dtype=float)
    if beta == 0.5:
        with np.errstate(divide="ignore"):
            out = np.where(t_arr > 0, special.erfc(0.5 / np.sqrt(np.maximum(t_arr, 0.0))), 0.0)
    else:
        out = np.vectorize(
            lambda x: _kanter_integral(beta, x, weight_by_a=False) if x > 0 else 0.0,
            otypes=[float],
        )(t_arr)
    return float(out) if np.ndim(t) == 0 else out
