"""Complete one-factor Markov market: quadrature fields and closed forms.

The terminal data are payoff functions of the factor level W_1 (security
s, supplier book g, demander endowment h).  Value fields come from the
Cole-Hopf form: conditional exponential certainty equivalents of the
terminal data under the Gaussian transition, evaluated with probabilists'
Gauss-Hermite quadrature in log space.  Spatial gradients use the exact
Gaussian kernel identity d/dw E[G(w+s*Z)] = E[Z*G(w+s*Z)]/s, so no
derivative of the terminal callables is ever needed.

Two parametric families carry their own closed forms for cross-checks:
``QuadraticModel`` (linear security, linear-plus-quadratic endowment) and
``ShockWaveModel`` whose gradient field is an exact tanh traveling wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import (
    NoRootError,
    ParameterError,
    PreconditionError,
    QuadratureError,
)
from .paths import PathSample
from .utility import AgentPair

DEFAULT_ORDER = 128
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@lru_cache(maxsize=16)
def _rules(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Probabilists' Gauss-Hermite nodes and normalized log-weights."""
    if order < 2:
        raise ParameterError("quadrature order must be >= 2")
    with np.errstate(over="ignore", invalid="ignore"):
        nodes, weights = hermegauss(order)
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        raise QuadratureError(
            f"Hermite rule of order {order} is not computable in double precision"
        )
    with np.errstate(divide="ignore"):
        logw = np.log(weights) - _LOG_SQRT_2PI
    return nodes, logw


@dataclass(frozen=True)
class MarkovPayoffs:
    """Terminal data s, g, h as vectorized callables of the factor level, plus agents."""

    s_fn: Callable[[np.ndarray], np.ndarray]
    g_fn: Callable[[np.ndarray], np.ndarray]
    h_fn: Callable[[np.ndarray], np.ndarray]
    agents: AgentPair


def _terminal_values(fn, points) -> np.ndarray:
    vals = np.asarray(fn(points), dtype=float)
    if vals.shape != points.shape:
        vals = np.broadcast_to(vals, points.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("terminal payoff is non-finite at a quadrature node")
    return vals


def _check_t(t: float, terminal_ok: bool):
    if not 0.0 <= t <= 1.0:
        raise ParameterError("t must lie in [0, 1]")
    if not terminal_ok and t >= 1.0:
        raise ParameterError("gradient fields need t < 1")


def _ce_field(fn, t: float, w: float, aversion: float, order: int) -> float:
    """Conditional certainty equivalent E-form of fn(W_1) given W_t = w."""
    if t == 1.0:
        vals = _terminal_values(fn, np.asarray([w], dtype=float))
        return float(vals[0])
    nodes, logw = _rules(order)
    spread = math.sqrt(1.0 - t)
    vals = _terminal_values(fn, w + spread * nodes)
    if aversion == 0.0:
        return float(np.exp(logw) @ vals)
    return float(-logsumexp(logw - aversion * vals) / aversion)


def _grad_field(fn, t: float, w: float, aversion: float, order: int) -> float:
    """w-derivative of _ce_field via the Gaussian kernel identity (t < 1)."""
    nodes, logw = _rules(order)
    spread = math.sqrt(1.0 - t)
    vals = _terminal_values(fn, w + spread * nodes)
    if aversion == 0.0:
        return float(np.exp(logw) @ (nodes * vals)) / spread
    shifted = logw - aversion * vals
    shifted -= shifted.max()
    weights = np.exp(shifted)
    return -float(nodes @ weights) / (aversion * spread * float(weights.sum()))


def field_v(payoffs: MarkovPayoffs, t: float, w: float, order: int = DEFAULT_ORDER) -> float:
    """Aggregate allocation value v(t, w): CE of (g+h)(W_1) at aversion c*gamma/(c+gamma)."""
    _check_t(t, terminal_ok=True)
    fn = lambda x: np.asarray(payoffs.g_fn(x), dtype=float) + np.asarray(
        payoffs.h_fn(x), dtype=float
    )
    return _ce_field(fn, t, w, payoffs.agents.aggregate_aversion, order)


def field_p(
    payoffs: MarkovPayoffs, t: float, w: float, y: float, order: int = DEFAULT_ORDER
) -> float:
    """Supplier book value p(t, w, y): CE of (g - y*s)(W_1) at aversion gamma."""
    _check_t(t, terminal_ok=True)
    fn = lambda x: np.asarray(payoffs.g_fn(x), dtype=float) - y * np.asarray(
        payoffs.s_fn(x), dtype=float
    )
    return _ce_field(fn, t, w, payoffs.agents.gamma, order)


def field_u(payoffs: MarkovPayoffs, t: float, w: float, order: int = DEFAULT_ORDER) -> float:
    """u = dv/dw, computed by differentiating under the quadrature."""
    _check_t(t, terminal_ok=False)
    fn = lambda x: np.asarray(payoffs.g_fn(x), dtype=float) + np.asarray(
        payoffs.h_fn(x), dtype=float
    )
    return _grad_field(fn, t, w, payoffs.agents.aggregate_aversion, order)


def field_q(
    payoffs: MarkovPayoffs, t: float, w: float, y: float, order: int = DEFAULT_ORDER
) -> float:
    """q = dp/dw at inventory y, computed by differentiating under the quadrature."""
    _check_t(t, terminal_ok=False)
    fn = lambda x: np.asarray(payoffs.g_fn(x), dtype=float) - y * np.asarray(
        payoffs.s_fn(x), dtype=float
    )
    return _grad_field(fn, t, w, payoffs.agents.gamma, order)


def replication_price(
    payoffs: MarkovPayoffs, t: float = 0.0, w: float = 0.0, order: int = DEFAULT_ORDER
) -> float:
    """Supplier indifference charge for taking on -H: CE_gamma(g) - CE_gamma(g+h)."""
    _check_t(t, terminal_ok=True)
    gamma = payoffs.agents.gamma
    g_only = lambda x: np.asarray(payoffs.g_fn(x), dtype=float)
    g_plus_h = lambda x: np.asarray(payoffs.g_fn(x), dtype=float) + np.asarray(
        payoffs.h_fn(x), dtype=float
    )
    return _ce_field(g_only, t, w, gamma, order) - _ce_field(g_plus_h, t, w, gamma, order)


def completeness_invert(
    payoffs: MarkovPayoffs,
    t: float,
    w: float,
    z: float,
    order: int = DEFAULT_ORDER,
    bracket: Tuple[float, float] = (-50.0, 50.0),
    residual_tol: float = 1e-10,
    max_expansions: int = 30,
) -> float:
    """Solve -dp/dw(t, w, y) = z for the replicating inventory y.

    Brackets geometrically from ``bracket`` until the residual changes sign,
    verifies the map is strictly monotone on the bracket at 9 sample points,
    then polishes with Brent to |residual| <= residual_tol.
    """
    _check_t(t, terminal_ok=False)

    def residual(y: float) -> float:
        return -field_q(payoffs, t, w, y, order) - z

    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ParameterError("bracket must satisfy lo < hi")
    r_lo, r_hi = residual(lo), residual(hi)
    expansions = 0
    while r_lo * r_hi > 0.0:
        if expansions >= max_expansions:
            raise NoRootError(
                f"no sign change in [{lo}, {hi}] after {expansions} expansions"
            )
        lo, hi = 2.0 * lo, 2.0 * hi
        r_lo, r_hi = residual(lo), residual(hi)
        expansions += 1
    probes = np.linspace(lo, hi, 9)
    probe_vals = np.array([residual(p) for p in probes])
    diffs = np.diff(probe_vals)
    # deep exponential tilts flatten numerically at the bracket ends, so only a
    # genuine direction reversal (not a flat stretch) disqualifies the map
    tol = 1e-12 * max(1.0, float(np.max(np.abs(probe_vals))))
    if (diffs > tol).any() and (diffs < -tol).any():
        raise PreconditionError(
            "y -> -dp/dw is not monotone on the searched bracket"
        )
    root = brentq(residual, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    if abs(residual(root)) > residual_tol:
        raise NoRootError(f"Brent polish left residual {residual(root):.3e}")
    return float(root)


def optimal_strategy_markov(
    payoffs: MarkovPayoffs,
    t: float,
    w: float,
    order: int = DEFAULT_ORDER,
    bracket: Tuple[float, float] = (-50.0, 50.0),
) -> float:
    """Optimal demander position: invert completeness at z = -(c/(c+gamma)) * dv/dw."""
    target = -payoffs.agents.demander_weight * field_u(payoffs, t, w, order)
    return completeness_invert(payoffs, t, w, target, order=order, bracket=bracket)


# ---------------------------------------------------------------------------
# quadratic-Gaussian family


@dataclass(frozen=True)
class QuadraticModel:
    """Linear security s = mu + sigma*w, book g = g_load * s, endowment
    h = h_const + a_lin*w + b_quad*w^2/2.  Requires sigma != 0 and
    1 + abar*b_quad > 0."""

    g_load: float
    mu: float
    sigma: float
    a_lin: float
    b_quad: float
    agents: AgentPair
    h_const: float = 0.0

    def __post_init__(self):
        if self.sigma == 0.0 or not math.isfinite(self.sigma):
            raise ParameterError("sigma must be finite and nonzero")
        abar = self.agents.aggregate_aversion
        if 1.0 + abar * self.b_quad <= 0.0:
            raise ParameterError(
                "aggregate aversion too large for the quadratic endowment: "
                "need 1 + abar*b_quad > 0"
            )

    def payoffs(self) -> MarkovPayoffs:
        return MarkovPayoffs(
            s_fn=lambda w: self.mu + self.sigma * np.asarray(w, dtype=float),
            g_fn=lambda w: self.g_load * (self.mu + self.sigma * np.asarray(w, dtype=float)),
            h_fn=lambda w: self.h_const
            + self.a_lin * np.asarray(w, dtype=float)
            + 0.5 * self.b_quad * np.asarray(w, dtype=float) ** 2,
            agents=self.agents,
        )


def quadratic_v(model: QuadraticModel, t: float, w: float) -> float:
    """Closed-form aggregate value field for the quadratic family."""
    _check_t(t, terminal_ok=True)
    abar = model.agents.aggregate_aversion
    lin = model.g_load * model.sigma + model.a_lin + model.b_quad * w
    denom = 1.0 + abar * model.b_quad * (1.0 - t)
    out = (
        model.h_const
        + model.g_load * model.mu
        + (model.g_load * model.sigma + model.a_lin) * w
        + 0.5 * model.b_quad * w**2
        - 0.5 * abar * lin**2 * (1.0 - t) / denom
    )
    if abar > 0.0:
        out += 0.5 * math.log(denom) / abar
    else:
        # risk-neutral limit of log(denom)/(2*abar): the plain variance term
        out += 0.5 * model.b_quad * (1.0 - t)
    return out


def quadratic_p(model: QuadraticModel, t: float, w: float, y: float) -> float:
    """Closed-form supplier book value for the quadratic family."""
    _check_t(t, terminal_ok=True)
    gamma = model.agents.gamma
    q = model.g_load - y
    return q * model.mu + q * model.sigma * w - 0.5 * gamma * q**2 * model.sigma**2 * (1.0 - t)


@dataclass(frozen=True)
class QuadraticForms:
    v: float
    p_at: Callable[[float], float]
    y_star: float
    s_star: float
    convexity: float
    volatility: float


def quadratic_closed_forms(model: QuadraticModel, t: float, w: float) -> QuadraticForms:
    """All closed-form fields of the quadratic family at one state (t, w).

    ``volatility`` is the quadratic-variation density of the efficient price,
    ``convexity`` the local curvature gamma*sigma^2*(1-t) of the price curve.
    """
    _check_t(t, terminal_ok=True)
    agents = model.agents
    abar = agents.aggregate_aversion
    lin = model.g_load * model.sigma + model.a_lin
    denom = 1.0 + abar * model.b_quad * (1.0 - t)
    y_star = (
        model.g_load
        - (lin + model.b_quad * w) / model.sigma * agents.demander_weight / denom
    )
    s_star = model.mu + model.sigma * (w - lin * abar * (1.0 - t)) / denom
    return QuadraticForms(
        v=quadratic_v(model, t, w),
        p_at=lambda y: quadratic_p(model, t, w, y),
        y_star=y_star,
        s_star=s_star,
        convexity=agents.gamma * model.sigma**2 * (1.0 - t),
        volatility=model.sigma**2 / denom**2,
    )


# ---------------------------------------------------------------------------
# shock-wave family


def _log_cosh(x):
    x = np.asarray(x, dtype=float)
    return np.abs(x) + np.log1p(np.exp(-2.0 * np.abs(x))) - math.log(2.0)


@dataclass(frozen=True)
class ShockWaveModel:
    """Traveling-wave endowment: s = mu - sigma*w, g = 0,
    h(w) = w - log cosh(a*(w - w_c))/a + offset, with a the aggregate aversion."""

    mu: float
    sigma: float
    w_c: float
    agents: AgentPair
    offset: float = 0.0

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ParameterError("sigma must be finite and > 0")
        if self.agents.aggregate_aversion <= 0.0:
            raise ParameterError("shock wave needs strictly positive aggregate aversion")

    @property
    def wave_aversion(self) -> float:
        return self.agents.aggregate_aversion

    def payoffs(self) -> MarkovPayoffs:
        a = self.wave_aversion
        return MarkovPayoffs(
            s_fn=lambda w: self.mu - self.sigma * np.asarray(w, dtype=float),
            g_fn=lambda w: np.zeros_like(np.asarray(w, dtype=float)),
            h_fn=lambda w: np.asarray(w, dtype=float)
            - _log_cosh(a * (np.asarray(w, dtype=float) - self.w_c)) / a
            + self.offset,
            agents=self.agents,
        )


def tanh_field(model: ShockWaveModel, t, w):
    """Exact gradient field u(t, w) = 1 - tanh(a*(w - w_c) - a^2*(1-t))."""
    a = model.wave_aversion
    return 1.0 - np.tanh(a * (np.asarray(w, dtype=float) - model.w_c) - a**2 * (1.0 - t))


def wave_position(model: ShockWaveModel, t) -> float:
    """Steepest point of the price wave in the -W coordinate: -w_c - a*(1-t)."""
    return -model.w_c - model.wave_aversion * (1.0 - np.asarray(t, dtype=float))


def shockwave_strategy(model: ShockWaveModel, t, w):
    """Optimal position (c/(c+gamma)) * u(t, w) / sigma along the wave."""
    return model.agents.demander_weight * tanh_field(model, t, w) / model.sigma


def shockwave_price(model: ShockWaveModel, t, w):
    """Efficient price mu - sigma*w + sigma*(1-t)*a*u(t, w)."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    a = model.wave_aversion
    return model.mu - model.sigma * w + model.sigma * (1.0 - t) * a * tanh_field(model, t, w)


@dataclass(frozen=True)
class ShockWavePathRecord:
    """Wave-market state along one driver path, one row per grid time."""

    times: np.ndarray
    w: np.ndarray
    s_star: np.ndarray
    y_star: np.ndarray
    wave_position: np.ndarray


def shockwave_path(model: ShockWaveModel, path: PathSample, grid) -> ShockWavePathRecord:
    """Evaluate the wave market along a standard Brownian driver path."""
    times = grid.times
    w = path.x
    return ShockWavePathRecord(
        times=times,
        w=w,
        s_star=shockwave_price(model, times, w),
        y_star=shockwave_strategy(model, times, w),
        wave_position=wave_position(model, times),
    )


@dataclass(frozen=True)
class CrashEvent:
    index: int
    time: float
    drawdown: float
    bound: float

    @property
    def satisfied(self) -> bool:
        return self.drawdown >= self.bound


def crash_events(model: ShockWaveModel, record: ShockWavePathRecord) -> list:
    """Upcrossings of the wave front and the realized price drawdown around each.

    A crossing happens between grid times t_i, t_{i+1} when
    psi_t = W_t - a*(1-t) - w_c moves from negative to nonnegative.  The
    drawdown is the largest peak-to-trough fall of s_star within the time
    window |t - t_i| <= 1/a; the steep-slope bound is
    sigma * a * (1 - t_i) * tanh(1).
    """
    a = model.wave_aversion
    times = record.times
    psi = record.w - a * (1.0 - times) - model.w_c
    events = []
    for i in np.nonzero((psi[:-1] < 0.0) & (psi[1:] >= 0.0))[0]:
        in_window = np.abs(times - times[i]) <= 1.0 / a
        s_win = record.s_star[in_window]
        drawdown = float(np.max(np.maximum.accumulate(s_win) - s_win))
        bound = model.sigma * a * (1.0 - times[i]) * math.tanh(1.0)
        events.append(CrashEvent(int(i), float(times[i]), drawdown, bound))
    return events
