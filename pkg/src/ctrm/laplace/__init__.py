"""Numerical Laplace toolbox: inversion, forward transforms and special functions."""

from .inversion import (
    GridFunction,
    InversionConfig,
    TransformValue,
    forward_transform,
    invert,
    stehfest_weights,
)
from .mittag_leffler import mittag_leffler
from .stable import stable_cdf, stable_density

__all__ = [
    "GridFunction",
    "InversionConfig",
    "TransformValue",
    "forward_transform",
    "invert",
    "stehfest_weights",
    "mittag_leffler",
    "stable_cdf",
    "stable_density",
]
