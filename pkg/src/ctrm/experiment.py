"""Monte-Carlo convergence studies against the limit CDFs.

Samples are drawn in fixed-size chunks; chunk ``k`` always uses the stream
``(seed, k)``. Results therefore depend on the seed and chunk size only,
never on how many workers draw the chunks. The same chunk streams are reused
for every ``c`` (common random numbers), and CTRM and OCTRM values always come
from the same paths.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedModelError
from .limits import limit_cdf_function
from .model import ModelSpec
from .process import Which, simulate_rescaled
from .rng import SeededStream

__all__ = [
    "EcdfTable",
    "ecdf_eval",
    "ks_distance",
    "quantile_grid",
    "draw_rescaled",
    "ConvergenceRow",
    "ConvergenceReport",
    "run_convergence",
    "CompareResult",
    "compare_ctrm_octrm",
    "DEFAULT_CHUNK",
]

DEFAULT_CHUNK = 10_000
QUANTILE_POINTS = 512
# 99% asymptotic Kolmogorov quantile.
KOLMOGOROV_99 = 1.6276


@dataclass(frozen=True)
class EcdfTable:
    sorted_samples: np.ndarray
    n: int

    def __post_init__(self):
        s = np.asarray(self.sorted_samples, dtype=float)
        if s.ndim != 1 or s.size != self.n or self.n < 1:
            raise DomainError("EcdfTable needs a non-empty 1-d sample with n == len(samples)")
        if np.any(np.isnan(s)) or np.any(s[1:] < s[:-1]):
            raise DomainError("samples must be sorted and free of NaN")
        object.__setattr__(self, "sorted_samples", s)

    @classmethod
    def from_samples(cls, samples) -> "EcdfTable":
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        return cls(s, s.size)


def ecdf_eval(table: EcdfTable, x):
    """Right-continuous ``#{samples <= x} / n``; ``-inf`` samples count below any ``x``."""
    out = np.searchsorted(table.sorted_samples, x, side="right") / table.n
    return float(out) if np.ndim(x) == 0 else out


def ks_distance(table: EcdfTable, cdf, xs=None) -> float:
    """``sup |ECDF - cdf|`` over ``xs`` and both one-sided limits at every sample jump.

    ``cdf`` must be vectorised. For a continuous ``cdf`` the sample jumps alone
    give the exact supremum; ``xs`` adds further evaluation points.
    """
    s = table.sorted_samples
    jumps = np.unique(s[np.isfinite(s)])
    dist = 0.0
    if jumps.size:
        f = np.asarray(cdf(jumps), dtype=float)
        right = np.searchsorted(s, jumps, side="right") / table.n
        left = np.searchsorted(s, jumps, side="left") / table.n
        dist = max(np.max(np.abs(right - f)), np.max(np.abs(left - f)))
    if xs is not None and np.size(xs):
        xs = np.asarray(xs, dtype=float)
        dist = max(dist, float(np.max(np.abs(ecdf_eval(table, xs) - np.asarray(cdf(xs), dtype=float)))))
    return float(dist)


def quantile_grid(cdf, n_points: int = QUANTILE_POINTS, lo: float = 1e-30, hi: float = 1e30) -> np.ndarray:
    """Points ``x_k`` with ``cdf(x_k) = (k + 1/2) / n_points`` by bisection in ``log x``."""
    p = (np.arange(n_points) + 0.5) / n_points
    a = np.full(n_points, math.log(lo))
    b = np.full(n_points, math.log(hi))
    for _ in range(100):
        mid = 0.5 * (a + b)
        below = np.asarray(cdf(np.exp(mid))) < p
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return np.exp(0.5 * (a + b))


def _chunks(n_samples: int, chunk_size: int):
    return [(k, min(chunk_size, n_samples - k * chunk_size)) for k in range(-(-n_samples // chunk_size))]


def draw_rescaled(model: ModelSpec, c: float, t: float, n_samples: int, seed: int, workers: int = 1, chunk_size: int = DEFAULT_CHUNK):
    """Rescaled ``(V, U)`` samples, concatenated in chunk order."""
    if n_samples < 0 or chunk_size < 1:
        raise DomainError("n_samples must be >= 0 and chunk_size >= 1")
    jobs = _chunks(int(n_samples), int(chunk_size))

    def one(job):
        k, size = job
        return simulate_rescaled(model, c, t, size, SeededStream(seed, k))

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(job) for job in jobs]
    if not parts:
        return np.empty(0), np.empty(0)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


@dataclass(frozen=True)
class ConvergenceRow:
    c: float
    n_samples: int
    ks_distance: float
    mc_standard_error: float
    passed: bool


@dataclass(frozen=True)
class ConvergenceReport:
    model: dict
    which: str
    t: float
    seed: int
    ks_threshold: float
    rows: tuple = field(default_factory=tuple)

    def __post_init__(self):
        cs = [r.c for r in self.rows]
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise DomainError("report rows must have strictly increasing c")

    @property
    def ks_column(self) -> list:
        return [r.ks_distance for r in self.rows]

    @property
    def strictly_decreasing(self) -> bool:
        ks = self.ks_column
        return all(b < a for a, b in zip(ks, ks[1:]))


def run_convergence(
    model: ModelSpec,
    which,
    t: float,
    cs,
    n_samples: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    ks_threshold: float = 0.05,
) -> ConvergenceReport:
    """KS distance between rescaled samples at ``c t`` and the limit CDF at ``t``, for each ``c``.

    A row passes when its KS distance is below ``ks_threshold``.
    """
    which = Which(which)
    if not model.has_limit:
        raise UnsupportedModelError(f"{type(model).__name__} has no scaling limit")
    cdf = limit_cdf_function(model, which, t)
    grid = quantile_grid(cdf)
    rows = []
    for c in sorted(float(c) for c in cs):
        v, u = draw_rescaled(model, c, t, n_samples, seed, workers, chunk_size)
        table = EcdfTable.from_samples(v if which is Which.CTRM else u)
        ks = ks_distance(table, cdf, grid)
        rows.append(ConvergenceRow(c, int(n_samples), ks, 0.5 / math.sqrt(n_samples), ks < ks_threshold))
    return ConvergenceReport(model.to_dict(), which.value, float(t), int(seed), float(ks_threshold), tuple(rows))


@dataclass(frozen=True)
class CompareResult:
    max_gap: float
    location: float
    noise: float


def compare_ctrm_octrm(
    model: ModelSpec, t: float, c: float, n_samples: int, seed: int, workers: int = 1, chunk_size: int = DEFAULT_CHUNK
) -> CompareResult:
    """Largest ``ECDF_V - ECDF_U`` over all sample points of a paired run.

    ``noise`` is the binomial standard error ``sqrt(p (1 - p) / n)`` of the
    paired indicator difference ``1{V <= x} - 1{U <= x}`` at the maximiser.
    """
    v, u = draw_rescaled(model, c, t, n_samples, seed, workers, chunk_size)
    tv, tu = EcdfTable.from_samples(v), EcdfTable.from_samples(u)
    pts = np.unique(np.concatenate([v, u]))
    pts = pts[np.isfinite(pts)]
    gap = ecdf_eval(tv, pts) - ecdf_eval(tu, pts)
    i = int(np.argmax(np.abs(gap)))
    g = float(abs(gap[i]))
    return CompareResult(max_gap=g, location=float(pts[i]), noise=math.sqrt(g * (1.0 - g) / n_samples))
