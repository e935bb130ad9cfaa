"""Model families, their C-L exponents and scaling sequences.

Two families admit a sum-max-stable scaling limit with closed-form C-L
exponent:

* ``IndependentStableFrechet`` -- waits in the domain of a beta-stable law,
  jumps alpha-Frechet, independent of each other.
* ``CoupledProductFrechet`` -- waits exactly beta-stable with Laplace
  transform ``exp(-s**beta)`` and jumps ``J = W**(1/gamma) * Z`` with
  ``Z`` gamma-Frechet independent of ``W``.

``ExponentialIndependent`` has no heavy-tailed limit; it exists because its
pre-limit Laplace transforms are explicit and therefore make a sharp oracle
for the renewal machinery.

The exponent callables are written with plain arithmetic so they accept
floats as well as ``mpmath.mpf`` arguments (needed by extended precision
Laplace inversion).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, ClassVar

from scipy import integrate, special

from .errors import DomainError, UnsupportedModelError

__all__ = [
    "ModelSpec",
    "IndependentStableFrechet",
    "CoupledProductFrechet",
    "ExponentialIndependent",
    "ClExponent",
    "ScalingSequences",
    "check_stable_index",
    "check_frechet_shape",
    "cl_exponent",
    "exponent_measure_tail",
    "scaling",
    "model_from_dict",
]


def check_stable_index(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"stable index must satisfy 0 < beta < 1, got {beta!r}")
    return beta


def check_frechet_shape(shape: float) -> float:
    shape = float(shape)
    if not (shape > 0.0 and math.isfinite(shape)):
        raise DomainError(f"Frechet shape must be positive and finite, got {shape!r}")
    return shape


class ModelSpec:
    """Common base of the three model families."""

    kind: ClassVar[str]

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}

    @property
    def has_limit(self) -> bool:
        return True


@dataclass(frozen=True)
class IndependentStableFrechet(ModelSpec):
    beta: float
    alpha: float

    kind: ClassVar[str] = "independent"

    def __post_init__(self):
        object.__setattr__(self, "beta", check_stable_index(self.beta))
        object.__setattr__(self, "alpha", check_frechet_shape(self.alpha))


@dataclass(frozen=True)
class CoupledProductFrechet(ModelSpec):
    beta: float
    gamma: float

    kind: ClassVar[str] = "coupled"

    def __post_init__(self):
        object.__setattr__(self, "beta", check_stable_index(self.beta))
        object.__setattr__(self, "gamma", check_frechet_shape(self.gamma))


@dataclass(frozen=True)
class ExponentialIndependent(ModelSpec):
    """Exponential waits with independent standard Pareto jumps.

    ``F_J(x) = 1 - 1/x`` on ``[1, inf)``.
    """

    rate: float = 1.0
    jump: str = "pareto"

    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        rate = float(self.rate)
        if not (rate > 0.0 and math.isfinite(rate)):
            raise DomainError(f"rate must be positive, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)
        if self.jump != "pareto":
            raise DomainError(f"unknown jump distribution {self.jump!r}")

    @property
    def has_limit(self) -> bool:
        return False

    def jump_cdf(self, x):
        if x < 1:
            return 0.0 * x
        return 1 - 1 / x

    def wait_laplace(self, xi):
        """``E[exp(-xi W)]``."""
        return self.rate / (self.rate + xi)

    def joint_cl_transform(self, xi, x):
        """``E[exp(-xi W) 1{J <= x}]``; factorises because W and J are independent."""
        return self.jump_cdf(x) * self.wait_laplace(xi)


_MODELS = {
    cls.kind: cls
    for cls in (IndependentStableFrechet, CoupledProductFrechet, ExponentialIndependent)
}


def model_from_dict(data: dict) -> ModelSpec:
    data = dict(data)
    try:
        cls = _MODELS[data.pop("kind")]
    except KeyError as exc:
        raise DomainError(f"unknown model kind in {data!r}") from exc
    try:
        return cls(**data)
    except TypeError as exc:
        raise DomainError(str(exc)) from exc


@dataclass(frozen=True)
class ClExponent:
    """C-L exponent ``psi(xi, x)`` together with its two marginals.

    ``psi(xi, inf) == psi_D(xi)`` and ``psi(0, x) == -log_FA(x)``. For
    ``x <= x0`` the exponent is ``+inf`` (the CDF carries no mass there).
    """

    psi: Callable
    psi_D: Callable
    log_FA: Callable
    x0: float
    xF: float


def cl_exponent(model: ModelSpec) -> ClExponent:
    if isinstance(model, IndependentStableFrechet):
        beta, alpha = model.beta, model.alpha

        def psi(xi, x):
            if x <= 0:
                return math.inf
            return xi**beta + x**-alpha

        def log_FA(x):
            return -math.inf if x <= 0 else -(x**-alpha)

    elif isinstance(model, CoupledProductFrechet):
        beta, gamma = model.beta, model.gamma

        def psi(xi, x):
            if x <= 0:
                return math.inf
            return (xi + x**-gamma) ** beta

        def log_FA(x):
            return -math.inf if x <= 0 else -(x ** (-beta * gamma))

    else:
        raise UnsupportedModelError(f"{type(model).__name__} has no limit C-L exponent")

    def psi_D(xi):
        return xi**beta

    return ClExponent(psi=psi, psi_D=psi_D, log_FA=log_FA, x0=0.0, xF=math.inf)


def exponent_measure_tail(model: ModelSpec, t: float, x: float, epsrel: float = 1e-10) -> float:
    """Levy-exponent measure of ``(t, inf) x [0, x]`` for the coupled model.

    The defining integral ``int_t^inf exp(-r c) beta/Gamma(1-beta) r**(-beta-1) dr``
    with ``c = x**-gamma`` is mapped onto ``[0, 1]`` by ``r = t * y**(-1/beta)``,
    which turns it into ``t**-beta / Gamma(1-beta) * int_0^1 exp(-c t y**(-1/beta)) dy``
    with a bounded integrand, evaluated in closed form when ``c t <= 1``.
    """
    if not isinstance(model, CoupledProductFrechet):
        raise UnsupportedModelError("exponent_measure_tail is defined for the coupled model only")
    if not t > 0 or not x > 0:
        raise DomainError(f"need t > 0 and x > 0, got t={t!r}, x={x!r}")
    beta = model.beta
    head = t**-beta / special.gamma(1.0 - beta)
    ct = t * x**-model.gamma
    if ct == 0.0:
        return head
    if ct <= 1.0:
        # The integral equals exp(-a) - a**beta Gamma(1-beta, a) with a = c t;
        # no cancellation for a <= 1, where quadrature would miss the knee.
        upper = special.gamma(1.0 - beta) * special.gammaincc(1.0 - beta, ct)
        return head * (math.exp(-ct) - ct**beta * upper)
    inv_beta = 1.0 / beta
    log_ct = math.log(ct)

    def integrand(y):
        if y <= 0.0:
            return 0.0
        log_arg = log_ct - inv_beta * math.log(y)
        if log_arg > 700.0:
            return 0.0
        return math.exp(-math.exp(log_arg))

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=epsrel, limit=200)
    return head * val


@dataclass(frozen=True)
class ScalingSequences:
    """Norming sequences ``a_n, b_n, d_n`` and the time-scale functions.

    ``a_tilde(c) = c**beta`` inverts ``1/a(n) = c`` exactly for
    ``a_n = n**(-1/beta)``; ``b_tilde(c) = b(a_tilde(c))`` and ``d_tilde = 0``.
    """

    beta: float
    max_index: float

    def a(self, n):
        return n ** (-1.0 / self.beta)

    def b(self, n):
        return n ** (-1.0 / self.max_index)

    def d(self, n):
        return 0.0 * n

    def a_tilde(self, c):
        return c**self.beta

    def b_tilde(self, c):
        return self.b(self.a_tilde(c))

    def d_tilde(self, c):
        return 0.0 * c


def scaling(model: ModelSpec) -> ScalingSequences:
    if isinstance(model, IndependentStableFrechet):
        return ScalingSequences(beta=model.beta, max_index=model.alpha)
    if isinstance(model, CoupledProductFrechet):
        return ScalingSequences(beta=model.beta, max_index=model.beta * model.gamma)
    raise UnsupportedModelError(f"{type(model).__name__} has no scaling sequences")
