"""Seeded samplers for waiting times, jumps and (W, J) pairs.

Every stream is a counter-based Philox generator keyed by ``(seed, stream_id)``
through :class:`numpy.random.SeedSequence`, so chunks of a Monte-Carlo run can
be drawn on any worker in any order and still reproduce bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    CoupledProductFrechet,
    ExponentialIndependent,
    IndependentStableFrechet,
    ModelSpec,
    check_frechet_shape,
    check_stable_index,
)
from .errors import UnsupportedModelError

__all__ = [
    "SeededStream",
    "kanter_factor",
    "sample_stable_subordinator",
    "frechet_from_uniform",
    "sample_frechet",
    "sample_pair",
]

_U64 = 2**64


class SeededStream:
    """A reproducible source of uniforms owned by one consumer.

    Parameters
    ----------
    seed, stream_id : int
        Unsigned 64-bit integers. Equal pairs give identical sequences.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed, stream_id = int(seed), int(stream_id)
        if not (0 <= seed < _U64 and 0 <= stream_id < _U64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        self.seed = seed
        self.stream_id = stream_id
        ss = np.random.SeedSequence(seed, spawn_key=(stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"SeededStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniform_open(self, size=None):
        """Uniforms on the open interval (0, 1)."""
        u = self.generator.random(size)
        # random() lives on [0, 1); reflect to (0, 1].
        u = 1.0 - u
        if np.any(u >= 1.0):
            u = np.where(u >= 1.0, np.nextafter(1.0, 0.0), u)
        return u


def kanter_factor(beta, u):
    """Kanter's function ``A(u)`` on ``(0, pi)`` evaluated in log space.

    ``A(u) = sin(beta u)**(beta/(1-beta)) sin((1-beta) u) / sin(u)**(1/(1-beta))``.
    """
    u = np.asarray(u, dtype=float)
    q = 1.0 - beta
    log_a = (
        (beta / q) * np.log(np.sin(beta * u))
        + np.log(np.sin(q * u))
        - np.log(np.sin(u)) / q
    )
    return np.exp(log_a)


def sample_stable_subordinator(beta: float, stream: SeededStream, size=None):
    """One-sided beta-stable draws with ``E[exp(-s W)] = exp(-s**beta)``.

    Uses ``W = (A(U) / E)**((1-beta)/beta)`` with ``U ~ Unif(0, pi)`` and
    ``E ~ Exp(1)`` independent (Kanter / Chambers-Mallows-Stuck).
    """
    beta = check_stable_index(beta)
    u = math.pi * stream.uniform_open(size)
    e = -np.log(stream.uniform_open(size))
    w = (kanter_factor(beta, u) / e) ** ((1.0 - beta) / beta)
    return w if size is not None else float(w)


def frechet_from_uniform(shape: float, u):
    """Inverse-transform map ``u -> (-log u)**(-1/shape)``."""
    return (-np.log(u)) ** (-1.0 / shape)


def sample_frechet(shape: float, stream: SeededStream, size=None):
    """Draws from ``P(Z <= x) = exp(-x**-shape)``."""
    shape = check_frechet_shape(shape)
    z = frechet_from_uniform(shape, stream.uniform_open(size))
    return z if size is not None else float(z)


def sample_pair(model: ModelSpec, stream: SeededStream, size=None):
    """Draw ``(W, J)`` from the joint law of ``model``.

    The waits are always drawn before the jumps from the same stream, so a
    given stream yields the same sequence regardless of the caller.
    """
    if isinstance(model, IndependentStableFrechet):
        w = sample_stable_subordinator(model.beta, stream, size)
        j = sample_frechet(model.alpha, stream, size)
    elif isinstance(model, CoupledProductFrechet):
        w = sample_stable_subordinator(model.beta, stream, size)
        z = sample_frechet(model.gamma, stream, size)
        j = w ** (1.0 / model.gamma) * z
    elif isinstance(model, ExponentialIndependent):
        w = -np.log(stream.uniform_open(size)) / model.rate
        j = 1.0 / stream.uniform_open(size)
        if size is None:
            w, j = float(w), float(j)
    else:
        raise UnsupportedModelError(f"cannot sample {type(model).__name__}")
    return w, j
