"""One-parameter Mittag-Leffler function on the negative real axis."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln, rgamma

from ..errors import DomainError

__all__ = ["mittag_leffler"]

_EPS = np.finfo(float).eps
ASYMPTOTIC_TERMS = 60
# Neither regime certifies this absolute accuracy -> multiprecision series.
_FALLBACK_TOL = 1e-9
_CHUNK = 4096
_LOG_TINY = math.log(1e-18)
# The smallest retained asymptotic term understates the error by up to ~10x.
_ASYMPTOTIC_SAFETY = 10.0


def _series_log_terms(beta, az, k):
    with np.errstate(divide="ignore"):
        return k * np.log(az) - gammaln(1.0 + beta * k)


def _peak_log_term(beta, az):
    """Largest ``log |z**k / Gamma(1 + beta k)|`` over integer ``k``.

    The continuous maximiser sits near ``k* = |z|**(1/beta) / beta``; the
    integer neighbours around it are checked directly.
    """
    with np.errstate(divide="ignore", over="ignore"):
        k_star = np.floor(np.minimum(az ** (1.0 / beta) / beta, 1e7))
    offsets = np.arange(-2.0, 3.0)
    k = np.maximum(k_star[:, None] + offsets[None, :], 0.0)
    return _series_log_terms(beta, az[:, None], k).max(axis=1), k_star


def _series_length(beta, az_max):
    """Number of terms after which every term is below 1e-18 (past the peak)."""
    k_star = int(az_max ** (1.0 / beta) / beta)
    n = max(2 * k_star, 32)
    while _series_log_terms(beta, az_max, float(n)) > _LOG_TINY:
        n *= 2
    return n + 1


def _series(beta, z):
    az = np.abs(z)
    k = np.arange(_series_length(beta, float(az.max())), dtype=float)
    lt = _series_log_terms(beta, az[:, None], k[None, :])
    lt[:, 0] = 0.0  # z**0 == 1, including z == 0
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    return (signs * np.exp(lt)).sum(axis=1)


def _series_error(beta, z):
    """Rounding error of the series: the largest term times the error of its exponent."""
    az = np.abs(z)
    peak, k_star = _peak_log_term(beta, az)
    with np.errstate(divide="ignore", over="ignore"):
        exponent_size = 10.0 + 2.0 * k_star * np.abs(np.log(az))
        return _EPS * np.exp(np.maximum(peak, 0.0)) * exponent_size


def _asymptotic(beta, z):
    """``-sum_k z**-k / Gamma(1 - beta k)`` truncated before its smallest term."""
    k = np.arange(1, ASYMPTOTIC_TERMS + 1, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        powers = z[:, None] ** -k[None, :]
        terms = -powers * rgamma(1.0 - beta * k)[None, :]
        mags = np.abs(terms)
    usable = np.where(np.isfinite(mags) & (mags > 0), mags, np.inf)
    stop = np.argmin(usable, axis=1)
    smallest = usable[np.arange(z.size), stop]
    mask = k[None, :] - 1 < stop[:, None]
    total = np.where(mask, terms, 0.0).sum(axis=1)
    with np.errstate(over="ignore"):
        err = _ASYMPTOTIC_SAFETY * smallest
    return total, np.where(np.isfinite(err), err, np.inf)


def _spectral(beta, x):
    """``E_beta(-x)`` from its completely monotone spectral representation.

    ``E_beta(-x) = sin(beta pi)/(beta pi) int_0^inf exp(-(x u)**(1/beta))
    / (u**2 + 2 u cos(beta pi) + 1) du``, ``x >= 0``.
    """
    cos_b = math.cos(beta * math.pi)
    inv_beta = 1.0 / beta

    def integrand(u):
        return math.exp(-((x * u) ** inv_beta)) / (u * u + 2.0 * u * cos_b + 1.0)

    head, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    tail, _ = integrate.quad(integrand, 1.0, math.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return math.sin(beta * math.pi) / (beta * math.pi) * (head + tail)


def _ml_chunk(beta, z):
    s_err = _series_error(beta, z)
    out, a_err = _asymptotic(beta, z)
    use_series = s_err <= a_err
    if np.any(use_series):
        out[use_series] = _series(beta, z[use_series])
    best = np.minimum(s_err, a_err)
    for i in np.nonzero(best > _FALLBACK_TOL)[0]:
        out[i] = _spectral(beta, -float(z[i]))
    return out


def mittag_leffler(beta: float, z):
    """``E_beta(z) = sum_k z**k / Gamma(1 + beta k)`` for real ``z <= 0``.

    Each point is evaluated by the power series or by the algebraic
    asymptotic expansion, whichever has the smaller a-priori error estimate
    (rounding of the largest series term against the smallest retained
    asymptotic term). Where neither estimate is below ``1e-9`` (a narrow
    band around the crossover) the spectral integral is used instead. ``beta = 1`` returns ``exp(z)``.
    """
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"need 0 < beta <= 1, got {beta!r}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr > 0) or np.any(np.isnan(z_arr)):
        raise DomainError("mittag_leffler is implemented for z <= 0")
    if beta == 1.0:
        out = np.exp(z_arr)
    else:
        flat = z_arr.ravel()
        out = np.empty_like(flat)
        finite = np.isfinite(flat)
        out[~finite] = 0.0
        out[flat == 0.0] = 1.0
        idx = np.nonzero(finite & (flat != 0.0))[0]
        for start in range(0, idx.size, _CHUNK):
            sel = idx[start : start + _CHUNK]
            out[sel] = _ml_chunk(beta, flat[sel])
        out = out.reshape(z_arr.shape)
    return float(out) if np.ndim(z) == 0 else out
