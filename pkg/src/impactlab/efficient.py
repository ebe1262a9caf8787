"""Closed-form efficient market driven by a Levy factor.

A supplier (aversion gamma) quotes price curves for a terminal factor
claim; a demander (aversion c) carries a deterministic piecewise-constant
endowment loading H' plus cash h.  Everything here is the closed-form
consequence: the optimal demand schedule, the efficient intermediation
price and its risk premium/convexity corrections, realized trading P&L
along a simulated path, and the time-0 value of the whole allocation.

All formulas reduce to cumulant evaluations at the composite aversion
``abar = c*gamma/(c+gamma)``; ``c = inf`` branches to ``abar = gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cumulants import LevyModel, OneSidedStable
from .errors import DomainError, NonDifferentiableError, ParameterError
from .paths import PathGrid, PathSample, ShockSchedule
from .utility import AgentPair


@dataclass(frozen=True)
class LevyScenario:
    """Market data: factor model, agent pair, supplier loading a, endowment schedule, grid.

    Construction verifies that every inventory state the closed-form strategy
    can reach keeps the cumulant arguments inside the domain U.
    """

    model: LevyModel
    agents: AgentPair
    a: float
    schedule: ShockSchedule
    grid: PathGrid

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise ParameterError("loading a must be finite")
        g = self.agents.gamma
        if g > 0.0 and not self.model.domain_contains(g * self.a):
            raise DomainError("gamma * a outside the cumulant domain")
        abar = self.agents.aggregate_aversion
        for level in self.schedule.levels():
            # gamma*(a - Y*) equals abar*(a + H') identically, so one check
            # covers both the supplier's and the aggregate's arguments.
            if not self.model.domain_contains(abar * (self.a + level)):
                raise DomainError(
                    f"endowment level {level} pushes the aggregate argument out of domain"
                )

    @property
    def abar(self) -> float:
        return self.agents.aggregate_aversion


def optimal_position(agents: AgentPair, a: float, h_prime: float) -> float:
    """Y* = gamma/(c+gamma) * a - c/(c+gamma) * h'; the c = inf limit is -h'."""
    w = agents.demander_weight
    return (1.0 - w) * a - w * h_prime


def optimal_position_series(scenario: LevyScenario) -> np.ndarray:
    """Y* on each grid interval [t_i, t_{i+1}), from the snapped H' series."""
    h = scenario.schedule.series(scenario.grid)[:-1]
    w = scenario.agents.demander_weight
    return (1.0 - w) * scenario.a - w * h


def eipu(scenario: LevyScenario, x_t: float, h_prime_t: float, t: float) -> float:
    """Expected-impact-adjusted unit value x_t + (1-t) * kappa'(abar*(a+h'))."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    u = scenario.abar * (scenario.a + h_prime_t)
    return x_t + (1.0 - t) * scenario.model.kappa_prime(u)


def risk_premium(scenario: LevyScenario, h_prime_t: float, t: float) -> float:
    """(1-t) * (kappa'(0) - kappa'(abar*(a+h'))); subtracts from the compensated level."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    u = scenario.abar * (scenario.a + h_prime_t)
    return (1.0 - t) * (scenario.model.kappa_prime(0.0) - scenario.model.kappa_prime(u))


def efficient_convexity(scenario: LevyScenario, h_prime_t: float, t: float) -> float:
    """-gamma * (1-t) * kappa''(abar*(a+h')) >= 0, the local price-curve curvature."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    u = scenario.abar * (scenario.a + h_prime_t)
    return -scenario.agents.gamma * (1.0 - t) * scenario.model.kappa_double_prime(u)


def efficient_price(
    scenario: LevyScenario, x_t: float, h_prime_t: float, t: float, y: float
) -> float:
    """Price charged for y units when the market sits at the efficient inventory.

    y*x_t + ((1-t)/gamma) * (kappa(ubar) - kappa(ubar - gamma*y)) with
    ubar = abar*(a+h'); gamma = 0 degenerates to the risk-neutral line.
    """
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    g = scenario.agents.gamma
    ubar = scenario.abar * (scenario.a + h_prime_t)
    if g == 0.0:
        return y * (x_t + (1.0 - t) * scenario.model.kappa_prime(0.0))
    if not scenario.model.domain_contains(ubar - g * y):
        raise DomainError("trade size y leaves the cumulant domain")
    return y * x_t + (1.0 - t) / g * (
        scenario.model.kappa(ubar) - scenario.model.kappa(ubar - g * y)
    )


def realized_pnl(scenario: LevyScenario, path: PathSample, strategy) -> float:
    """Demander trading P&L of a per-interval position array along one path.

    strategy[i] is the position held on [t_i, t_{i+1}); the sums use this
    left-point value, matching simple predictable strategies:
    sum_i Y_i dX_i + (1/gamma) sum_i (kappa(gamma*(a-Y_i)) - kappa(gamma*a)) dt.
    """
    y = np.asarray(strategy, dtype=float)
    n = scenario.grid.n_steps
    if y.shape != (n,):
        raise ParameterError(f"strategy must have one position per interval ({n})")
    g = scenario.agents.gamma
    dt = scenario.grid.dt
    trade_leg = float(y @ path.increments)
    if g == 0.0:
        return trade_leg - scenario.model.kappa_prime(0.0) * float(y.sum()) * dt
    u = g * (scenario.a - y)
    if not scenario.model.domain_contains(u):
        raise DomainError("strategy leaves the supplier inventory domain")
    fee_leg = float(np.sum(scenario.model.kappa(u) - scenario.model.kappa(g * scenario.a)))
    return trade_leg + fee_leg * dt / g


def allocation_value(scenario: LevyScenario) -> float:
    """Time-0 certainty-equivalent value of the optimally intermediated endowment.

    h + ((c+gamma)/(c*gamma)) * sum_i kappa(abar*(a+H'_i)) dt - (1/gamma)*kappa(gamma*a),
    with left-endpoint H' sums; branches cover c = inf and gamma = 0.
    """
    agents = scenario.agents
    g = agents.gamma
    h_series = scenario.schedule.series(scenario.grid)[:-1]
    dt = scenario.grid.dt
    if g == 0.0:
        drift = scenario.model.kappa_prime(0.0)
        return scenario.schedule.h + drift * float(h_series.sum()) * dt
    abar = scenario.abar
    inv_weight = 1.0 / g if math.isinf(agents.c) else (agents.c + g) / (agents.c * g)
    body = inv_weight * float(np.sum(scenario.model.kappa(abar * (scenario.a + h_series)))) * dt
    return scenario.schedule.h + body - scenario.model.kappa(g * scenario.a) / g


@dataclass(frozen=True)
class EfficientPathRecord:
    """Per-grid-time market state along one path, plus terminal wealth split."""

    times: np.ndarray
    x: np.ndarray
    h_prime: np.ndarray
    y_star: np.ndarray
    s_star: np.ndarray
    risk_premium: np.ndarray
    convexity: np.ndarray
    endowment_payoff: float
    trading_pnl: float
    terminal_wealth: float


def efficient_path_record(scenario: LevyScenario, path: PathSample) -> EfficientPathRecord:
    """Evaluate the closed-form market along a simulated path.

    The risk premium column is NaN for the stable family, whose compensated
    level does not exist; s_star comes from the direct formula either way.
    """
    grid = scenario.grid
    times = grid.times
    h = path.h_prime
    w = scenario.agents.demander_weight
    y_star = (1.0 - w) * scenario.a - w * h
    u = scenario.abar * (scenario.a + h)
    slope = np.atleast_1d(scenario.model.kappa_prime(u))
    s_star = path.x + (1.0 - times) * slope
    curv = np.atleast_1d(scenario.model.kappa_double_prime(u))
    convexity = -scenario.agents.gamma * (1.0 - times) * curv
    if isinstance(scenario.model, OneSidedStable):
        premium = np.full_like(s_star, math.nan)
    else:
        premium = (1.0 - times) * (scenario.model.kappa_prime(0.0) - slope)
    endowment = scenario.schedule.h + float(h[:-1] @ path.increments)
    pnl = realized_pnl(scenario, path, y_star[:-1])
    return EfficientPathRecord(
        times=times,
        x=path.x,
        h_prime=h,
        y_star=y_star,
        s_star=s_star,
        risk_premium=premium,
        convexity=convexity,
        endowment_payoff=endowment,
        trading_pnl=pnl,
        terminal_wealth=endowment + pnl,
    )
