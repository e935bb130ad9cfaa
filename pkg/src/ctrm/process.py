"""Renewal paths, CTRM/OCTRM values and rescaled samples.

A path stores the cumulative waits ``S(n)`` and running maxima ``M(n)``. The
empty maximum ``M(0)`` is ``-inf`` so that ``V(t) <= x`` holds for every ``x``
before the first renewal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, PathExhaustedError
from .model import ExponentialIndependent, ModelSpec, scaling
from .rng import SeededStream, sample_pair

__all__ = [
    "Which",
    "PathRealization",
    "build_path",
    "renewal_count",
    "ctrm_value",
    "octrm_value",
    "rescaling",
    "simulate_rescaled",
    "rescaled_sample",
]


class Which(str, Enum):
    CTRM = "CTRM"
    OCTRM = "OCTRM"


@dataclass(frozen=True)
class PathRealization:
    waits: np.ndarray
    jumps: np.ndarray
    cum_sums: np.ndarray
    run_max: np.ndarray

    def __len__(self):
        return len(self.waits)


def build_path(pairs=(), *, waits=None, jumps=None) -> PathRealization:
    """Prefix sums of waits and prefix maxima of jumps.

    Pass either a sequence of ``(W, J)`` pairs or the two arrays as
    ``waits=`` and ``jumps=``.
    """
    if waits is not None or jumps is not None:
        waits = np.asarray(waits, dtype=float).ravel()
        jumps = np.asarray(jumps, dtype=float).ravel()
    else:
        arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
        waits, jumps = arr[:, 0].copy(), arr[:, 1].copy()
    if waits.shape != jumps.shape:
        raise DomainError("waits and jumps must have equal length")
    if np.any(~(waits > 0)):
        raise DomainError("waiting times must be strictly positive")
    return PathRealization(
        waits=waits,
        jumps=jumps,
        cum_sums=np.cumsum(waits),
        run_max=np.maximum.accumulate(jumps) if len(jumps) else jumps.copy(),
    )


def renewal_count(path: PathRealization, t: float) -> int:
    """``N(t) = max{n >= 0 : S(n) <= t}``."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    if len(path) == 0 or t > path.cum_sums[-1]:
        raise PathExhaustedError(f"path ends at S={path.cum_sums[-1] if len(path) else 0.0}, asked t={t}")
    return int(np.searchsorted(path.cum_sums, t, side="right"))


def _max_after(path: PathRealization, n: int) -> float:
    return -math.inf if n == 0 else float(path.run_max[n - 1])


def ctrm_value(path: PathRealization, t: float) -> float:
    """``V(t) = M(N(t))``."""
    return _max_after(path, renewal_count(path, t))


def octrm_value(path: PathRealization, t: float) -> float:
    """``U(t) = M(N(t) + 1)``."""
    n = renewal_count(path, t)
    if n + 1 > len(path):
        raise PathExhaustedError("OCTRM needs the renewal that straddles t")
    return _max_after(path, n + 1)


def rescaling(model: ModelSpec, c: float) -> tuple[float, float]:
    """Return ``(b_tilde(c), d_tilde(c))``; the pre-limit model is not rescaled."""
    if isinstance(model, ExponentialIndependent):
        return 1.0, 0.0
    seq = scaling(model)
    return float(seq.b_tilde(c)), float(seq.d_tilde(c))


def _block_size(model: ModelSpec, horizon: float) -> int:
    if isinstance(model, ExponentialIndependent):
        expected = model.rate * horizon
    else:
        expected = horizon ** scaling(model).beta
    return int(min(max(8.0, 2.0 * expected), 2048.0))


def simulate_rescaled(model: ModelSpec, c: float, t: float, n_samples: int, stream: SeededStream):
    """Simulate ``n_samples`` independent paths up to time ``c t``.

    Returns the rescaled pair ``(b~(c)(V(ct) - d~(c)), b~(c)(U(ct) - d~(c)))``
    as two arrays. Both come from the same paths, so ``U >= V`` elementwise.
    Pairs are drawn in blocks until every path has crossed the horizon.
    """
    if c <= 0 or t <= 0:
        raise DomainError("c and t must be positive")
    n_samples = int(n_samples)
    horizon = c * t
    block = _block_size(model, horizon)

    s = np.zeros(n_samples)
    m = np.full(n_samples, -np.inf)
    v_out = np.empty(n_samples)
    u_out = np.empty(n_samples)
    active = np.arange(n_samples)
    while active.size:
        w, j = sample_pair(model, stream, size=(active.size, block))
        cs = s[active, None] + np.cumsum(w, axis=1)
        cm = np.maximum(m[active, None], np.maximum.accumulate(j, axis=1))
        over = cs > horizon
        done = over[:, -1]
        if np.any(done):
            rows = np.nonzero(done)[0]
            k = np.argmax(over[rows], axis=1)
            u_out[active[rows]] = cm[rows, k]
            prev = np.where(k > 0, cm[rows, np.maximum(k - 1, 0)], m[active[rows]])
            v_out[active[rows]] = prev
        keep = ~done
        s[active[keep]] = cs[keep, -1]
        m[active[keep]] = cm[keep, -1]
        active = active[keep]

    b, d = rescaling(model, c)
    return b * (v_out - d), b * (u_out - d)


def rescaled_sample(model: ModelSpec, c: float, t: float, which: Which | str, stream: SeededStream) -> float:
    """A single rescaled CTRM or OCTRM value at time ``t``."""
    v, u = simulate_rescaled(model, c, t, 1, stream)
    return float(v[0] if Which(which) is Which.CTRM else u[0])
