"""Levy factor families and their exponential cumulants.

Each family fixes a law for the factor increment via the cumulant
``kappa(u) = -log E[exp(-u * X_1)]``, finite on a half-line or interval
``U`` that depends on the family.  All pricing formulas downstream only
touch the factor through ``kappa`` and its first two derivatives, so the
three families share one small interface:

* ``Brownian(b, sigma)``      kappa(u) = b*u - sigma^2 * u^2 / 2   on R
* ``GammaProcess(alpha, beta)``  kappa(u) = beta * log(1 + u/alpha)  on (-alpha, inf)
* ``OneSidedStable(r, alpha)``   kappa(u) = r * u^alpha              on [0, inf)

``kappa`` is concave with ``kappa(0) = 0`` in every case.  The stable
family is not differentiable at the left edge ``u = 0``; asking for a
derivative there raises :class:`NonDifferentiableError` rather than
returning an infinity that would poison downstream arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, NonDifferentiableError, ParameterError


def _as_float_array(u):
    out = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(out)):
        raise DomainError("cumulant argument must be finite")
    return out


@dataclass(frozen=True)
class Brownian:
    """Drifting Brownian factor: X_t = b*t + sigma*W_t."""

    b: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.b) and math.isfinite(self.sigma)):
            raise ParameterError("Brownian parameters must be finite")
        if self.sigma < 0.0:
            raise ParameterError("Brownian sigma must be >= 0")

    def domain_contains(self, u) -> bool:
        return bool(np.all(np.isfinite(np.asarray(u, dtype=float))))

    def _check(self, u):
        return _as_float_array(u)

    def kappa(self, u):
        u = self._check(u)
        out = self.b * u - 0.5 * self.sigma**2 * u**2
        return float(out) if out.ndim == 0 else out

    def kappa_prime(self, u):
        u = self._check(u)
        out = self.b - self.sigma**2 * u
        return float(out) if out.ndim == 0 else out

    def kappa_double_prime(self, u):
        u = self._check(u)
        out = np.full_like(u, -self.sigma**2)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return self.b

    def sample_increments(self, rng: np.random.Generator, dt: float, size: int):
        return rng.normal(loc=self.b * dt, scale=self.sigma * math.sqrt(dt), size=size)


@dataclass(frozen=True)
class GammaProcess:
    """Gamma subordinator with rate alpha and shape beta: X_1 ~ Gamma(beta, rate=alpha)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ParameterError("GammaProcess alpha (rate) must be > 0")
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ParameterError("GammaProcess beta (shape) must be > 0")

    def domain_contains(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(np.isfinite(u)) and np.all(u > -self.alpha))

    def _check(self, u):
        u = _as_float_array(u)
        if np.any(u <= -self.alpha):
            raise DomainError(
                f"gamma cumulant needs u > {-self.alpha} (rate boundary), got min {u.min()}"
            )
        return u

    def kappa(self, u):
        u = self._check(u)
        out = self.beta * np.log1p(u / self.alpha)
        return float(out) if out.ndim == 0 else out

    def kappa_prime(self, u):
        u = self._check(u)
        out = self.beta / (self.alpha + u)
        return float(out) if out.ndim == 0 else out

    def kappa_double_prime(self, u):
        u = self._check(u)
        out = -self.beta / (self.alpha + u) ** 2
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return self.beta / self.alpha

    def sample_increments(self, rng: np.random.Generator, dt: float, size: int):
        return rng.gamma(shape=self.beta * dt, scale=1.0 / self.alpha, size=size)


@dataclass(frozen=True)
class OneSidedStable:
    """Positive stable subordinator: kappa(u) = r * u**alpha, 0 < alpha < 1.

    Increments are sampled with the exponential/uniform transformation for
    positive stable laws (Kanter's representation), scaled so that
    ``E[exp(-u X_t)] = exp(-t * kappa(u))`` holds exactly.
    """

    r: float
    alpha: float

    def __post_init__(self):
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ParameterError("OneSidedStable r (rate) must be > 0")
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError("OneSidedStable alpha must lie in (0, 1)")

    def domain_contains(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(np.isfinite(u)) and np.all(u >= 0.0))

    def _check(self, u, strict: bool):
        u = _as_float_array(u)
        if np.any(u < 0.0):
            raise DomainError("stable cumulant needs u >= 0")
        if strict and np.any(u == 0.0):
            raise NonDifferentiableError(
                "stable cumulant has infinite one-sided slope at u = 0"
            )
        return u

    def kappa(self, u):
        u = self._check(u, strict=False)
        out = self.r * u**self.alpha
        return float(out) if out.ndim == 0 else out

    def kappa_prime(self, u):
        u = self._check(u, strict=True)
        out = self.r * self.alpha * u ** (self.alpha - 1.0)
        return float(out) if out.ndim == 0 else out

    def kappa_double_prime(self, u):
        u = self._check(u, strict=True)
        out = self.r * self.alpha * (self.alpha - 1.0) * u ** (self.alpha - 2.0)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        raise NonDifferentiableError(
            "one-sided stable factor has no finite mean (alpha < 1)"
        )

    def sample_increments(self, rng: np.random.Generator, dt: float, size: int):
        # Kanter: S = (A(theta)/E)^((1-alpha)/alpha) has E[exp(-u S)] = exp(-u^alpha)
        # for theta ~ U(0, pi), E ~ Exp(1); scale by (r*dt)^(1/alpha).
        a = self.alpha
        theta = np.pi * rng.random(size)
        np.clip(theta, 1e-12, np.pi - 1e-12, out=theta)
        expo = rng.exponential(size=size)
        np.maximum(expo, 1e-300, out=expo)
        log_a = (
            a * np.log(np.sin(a * theta))
            + (1.0 - a) * np.log(np.sin((1.0 - a) * theta))
            - np.log(np.sin(theta))
        ) / (1.0 - a)
        scale = (self.r * dt) ** (1.0 / a)
        return scale * np.exp(((1.0 - a) / a) * (log_a - np.log(expo)))


LevyModel = Union[Brownian, GammaProcess, OneSidedStable]


def kappa(model: LevyModel, u):
    """Cumulant kappa(u) = -log E[exp(-u * X_1)]; raises DomainError outside U."""
    return model.kappa(u)


def kappa_prime(model: LevyModel, u):
    """First derivative of kappa at an interior point of U."""
    return model.kappa_prime(u)


def kappa_double_prime(model: LevyModel, u):
    """Second derivative of kappa; nonpositive everywhere it exists."""
    return model.kappa_double_prime(u)


def domain_contains(model: LevyModel, u) -> bool:
    """True when u (scalar or array, all entries) lies in the family's domain U."""
    return model.domain_contains(u)
