"""Gaver-Stehfest inversion and forward transforms of tabulated functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy import integrate

from ..errors import AccuracyError, DomainError

__all__ = [
    "GridFunction",
    "InversionConfig",
    "stehfest_weights",
    "invert",
    "TransformValue",
    "forward_transform",
]


@dataclass(frozen=True)
class GridFunction:
    """Samples ``vals[i] = f(ts[i])`` on a strictly increasing positive grid."""

    ts: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        vals = np.asarray(self.vals, dtype=float)
        if ts.ndim != 1 or ts.shape != vals.shape:
            raise DomainError("ts and vals must be 1-d arrays of equal length")
        if ts.size and (ts[0] <= 0 or np.any(np.diff(ts) <= 0)):
            raise DomainError("ts must be positive and strictly increasing")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "vals", vals)

    def __len__(self):
        return self.ts.size


@dataclass(frozen=True)
class InversionConfig:
    """Gaver-Stehfest settings.

    ``precision="extended"`` evaluates the transform at ``mpmath.mpf``
    abscissae with enough working digits to absorb the cancellation in the
    weights; the transform must then accept ``mpf`` arguments.
    """

    order: int = 14
    precision: str = "double"
    method: str = "GaverStehfest"

    def __post_init__(self):
        if self.method != "GaverStehfest":
            raise DomainError(f"unknown inversion method {self.method!r}")
        if not isinstance(self.order, int) or self.order % 2 or not 4 <= self.order <= 20:
            raise DomainError(f"order must be an even integer in [4, 20], got {self.order!r}")
        if self.precision not in ("double", "extended"):
            raise DomainError(f"precision must be 'double' or 'extended', got {self.precision!r}")

    @property
    def digits(self) -> int:
        return 2 * self.order + 15


@lru_cache(maxsize=None)
def stehfest_weights(order: int) -> tuple[Fraction, ...]:
    """Exact rational Stehfest weights ``V_1 .. V_order``."""
    half = order // 2
    f = math.factorial
    weights = []
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j**half * f(2 * j),
                f(half - j) * f(j) * f(j - 1) * f(k - j) * f(2 * j - k),
            )
        weights.append(acc if (k + half) % 2 == 0 else -acc)
    return tuple(weights)


@lru_cache(maxsize=None)
def _float_weights(order: int) -> tuple[float, ...]:
    return tuple(float(w) for w in stehfest_weights(order))


def invert(transform: Callable, t: float, cfg: InversionConfig | None = None) -> float:
    """Approximate ``f(t)`` from its Laplace transform ``F(xi)``, ``xi > 0``.

    ``f(t) ~ ln2/t * sum_k V_k F(k ln2 / t)``; only real abscissae are used.
    """
    cfg = cfg or InversionConfig()
    if not t > 0:
        raise DomainError(f"inversion time must be positive, got {t!r}")
    if cfg.precision == "extended":
        with mpmath.workdps(cfg.digits):
            step = mpmath.log(2) / mpmath.mpf(t)
            terms = []
            for k, w in enumerate(stehfest_weights(cfg.order), start=1):
                val = transform(k * step)
                if not mpmath.isfinite(val):
                    raise AccuracyError(f"transform is not finite at xi={float(k * step)!r}")
                terms.append(mpmath.mpf(w.numerator) / w.denominator * val)
            return float(step * mpmath.fsum(terms))

    step = math.log(2.0) / t
    terms = []
    for k, w in enumerate(_float_weights(cfg.order), start=1):
        val = float(transform(k * step))
        if not math.isfinite(val):
            raise AccuracyError(f"transform is not finite at xi={k * step!r}")
        terms.append(w * val)
    return step * math.fsum(terms)


@dataclass(frozen=True)
class TransformValue:
    """Result of :func:`forward_transform` with its accuracy metadata."""

    value: float
    trapezoid: float
    tail: float
    accurate: bool

    def __float__(self):
        return self.value


def _fit_tail(ts, vals, tail_exponent):
    """Least-squares fit of ``f_inf + C t**-p`` on the last decade of the grid."""
    t_max = ts[-1]
    sel = ts >= t_max / 10.0
    if tail_exponent <= 0 or sel.sum() < 3:
        return float(vals[-1]), 0.0
    basis = np.column_stack([np.ones(sel.sum()), ts[sel] ** -tail_exponent])
    (f_inf, coef), *_ = np.linalg.lstsq(basis, vals[sel], rcond=None)
    return float(f_inf), float(coef)


def forward_transform(f: GridFunction, xi: float, tail_exponent: float = 0.0, rtol: float = 1e-4) -> TransformValue:
    """``int_0^inf exp(-xi t) f(t) dt`` from grid samples.

    Three pieces: ``[0, t_min]`` with ``f`` frozen at ``f(t_min)``, composite
    Simpson on the grid, and the analytic integral of a fitted tail
    ``f_inf + C t**-tail_exponent`` beyond ``t_max``. When the Simpson and
    trapezoid values differ by more than ``rtol`` (relative) the result is
    flagged as not accurate.
    """
    if not xi > 0:
        raise DomainError("xi must be positive")
    ts, vals = f.ts, f.vals
    weighted = np.exp(-xi * ts) * vals
    body = float(integrate.simpson(weighted, x=ts))
    body_trap = float(integrate.trapezoid(weighted, x=ts))
    t_min, t_max = ts[0], ts[-1]
    head = float(vals[0]) * -math.expm1(-xi * t_min) / xi

    f_inf, coef = _fit_tail(ts, vals, tail_exponent)
    tail = f_inf * math.exp(-xi * t_max) / xi
    if coef != 0.0:
        # int_T^inf e^{-xi t} t^{-p} dt = xi^{p-1} Gamma(1-p, xi T)
        p = tail_exponent
        tail += coef * float(xi ** (p - 1.0) * mpmath.gammainc(1.0 - p, xi * t_max))

    value = head + body + tail
    scale = max(abs(value), 1e-300)
    accurate = abs(body - body_trap) <= rtol * scale
    return TransformValue(value=value, trapezoid=head + body_trap + tail, tail=tail, accurate=accurate)
