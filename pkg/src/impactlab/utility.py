"""Exponential-utility certainty equivalents and indifference prices.

The central map is ``ce(F; a) = -(1/a) log E[exp(-a F)]`` for risk
aversion ``a``.  Two agents appear throughout: a supplier with aversion
``gamma`` and a demander with aversion ``c``; ``c = math.inf`` is a
legal first-class value meaning worst-case (essential infimum) pricing
and is handled by branching, never by arithmetic on the infinity.

On finite sample sets the map is computed with a log-sum-exp shift so
that large negative payoffs cannot overflow; builtin ``OverflowError``
is raised only if even the shifted sum is non-finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.special import logsumexp

from .cumulants import LevyModel
from .errors import DomainError, ParameterError

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class AgentPair:
    """Supplier aversion gamma >= 0 and demander aversion c in (0, inf]."""

    gamma: float
    c: float

    def __post_init__(self):
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ParameterError("gamma must be finite and >= 0")
        if not (self.c > 0.0):
            raise ParameterError("c must be > 0 (math.inf allowed)")
        if math.isnan(self.c):
            raise ParameterError("c must not be NaN")

    @property
    def aggregate_aversion(self) -> float:
        """Harmonic-style composite c*gamma/(c+gamma); gamma if c is inf, 0 if gamma is 0."""
        if self.gamma == 0.0:
            return 0.0
        if math.isinf(self.c):
            return self.gamma
        return self.c * self.gamma / (self.c + self.gamma)

    @property
    def demander_weight(self) -> float:
        """c/(c+gamma), the demander's share of aggregate risk; 1 if c is inf."""
        if math.isinf(self.c):
            return 1.0
        return self.c / (self.c + self.gamma)


@dataclass(frozen=True)
class SampleSet:
    """Finite weighted support of a payoff: values v_i with weights w_i summing to 1."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if v.ndim != 1 or w.shape != v.shape or v.size == 0:
            raise ParameterError("values and weights must be equal-length 1-d arrays")
        if not np.all(np.isfinite(v)):
            raise ParameterError("sample values must be finite")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ParameterError("weights must be finite and >= 0")
        if abs(w.sum() - 1.0) > _WEIGHT_TOL:
            raise ParameterError(f"weights must sum to 1 within {_WEIGHT_TOL}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, values) -> "SampleSet":
        v = np.asarray(values, dtype=float)
        return cls(v, np.full(v.shape, 1.0 / v.size))

    def shifted(self, cash: float) -> "SampleSet":
        return SampleSet(self.values + float(cash), self.weights)


def certainty_equivalent(samples: SampleSet, aversion: float) -> float:
    """ce(F; a) = -(1/a) log sum_i w_i exp(-a v_i), with the usual limits.

    a = 0 gives the plain mean, a = inf the worst supported value.
    """
    if aversion < 0.0 or math.isnan(aversion):
        raise ParameterError("aversion must be >= 0 (math.inf allowed)")
    v, w = samples.values, samples.weights
    if aversion == 0.0:
        return float(w @ v)
    if math.isinf(aversion):
        return float(v[w > 0.0].min())
    with np.errstate(over="ignore"):
        out = -logsumexp(-aversion * v, b=w) / aversion
    if not math.isfinite(out):
        raise OverflowError("certainty equivalent is non-finite even after shifting")
    return float(out)


def cash_invariance_check(samples: SampleSet, aversion: float, shift: float) -> float:
    """Residual ce(F + shift) - ce(F) - shift; zero up to roundoff by construction."""
    return (
        certainty_equivalent(samples.shifted(shift), aversion)
        - certainty_equivalent(samples, aversion)
        - shift
    )


def aggregated_utility(samples: SampleSet, agents: AgentPair) -> float:
    """Certainty equivalent at the composite aversion c*gamma/(c+gamma)."""
    return certainty_equivalent(samples, agents.aggregate_aversion)


def levy_pi(model: LevyModel, gamma: float, z: float, x_t: float, t: float) -> float:
    """Supplier indifference value at time t of z units of the terminal factor.

    Equals z*x_t + ((1-t)/gamma) * kappa(gamma*z); the gamma = 0 branch is
    the analytic limit z*x_t + (1-t)*z*kappa'(0).
    """
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    if gamma < 0.0 or not math.isfinite(gamma):
        raise ParameterError("gamma must be finite and >= 0")
    if gamma == 0.0:
        return z * x_t + (1.0 - t) * z * model.kappa_prime(0.0)
    if not model.domain_contains(gamma * z):
        raise DomainError(f"gamma*z = {gamma * z} outside the cumulant domain")
    return z * x_t + (1.0 - t) / gamma * model.kappa(gamma * z)


def levy_price_curve(
    model: LevyModel,
    gamma: float,
    a: float,
    z: float,
    y: float,
    x_t: float,
    t: float,
) -> float:
    """Price charged at time t for y units, at inventory z, endowment loading a.

    P_t(z, y) = y*x_t + ((1-t)/gamma) * (kappa(gamma*(a+z)) - kappa(gamma*(a+z-y))).
    Convex in y with P_t(z, 0) = 0.  gamma = 0 falls back to the risk-neutral
    line y * (x_t + (1-t)*kappa'(0)).
    """
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    if gamma < 0.0 or not math.isfinite(gamma):
        raise ParameterError("gamma must be finite and >= 0")
    if gamma == 0.0:
        return y * (x_t + (1.0 - t) * model.kappa_prime(0.0))
    u_hold = gamma * (a + z)
    u_after = gamma * (a + z - y)
    if not (model.domain_contains(u_hold) and model.domain_contains(u_after)):
        raise DomainError("inventory before or after the trade leaves the cumulant domain")
    return y * x_t + (1.0 - t) / gamma * (model.kappa(u_hold) - model.kappa(u_after))
