"""Discrete-time dynamic programming on a recombining binomial lattice.

The factor takes +-1/sqrt(n) steps with probability 1/2 over n periods,
so level j holds j+1 nodes at values (2m - j)/sqrt(n).  The demander's
value function is computed in composed form: one sup-convolution per
period applied to the aggregate terminal payoff, which only ever needs
one-step conditional certainty equivalents plus conditional prices of
the form Pi_t(G - y*S).  Cash never enters the state: values are stored
net of cash and the identity V(x, z) = x + V(0, z) is what tests check.

The per-period supremum is scanned on an inventory grid of resolution
``y_resolution`` and then polished with golden-section search between
the winning grid point's neighbors (the objective is concave in y).
Grid ties break toward the smallest |y|, then toward negative y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import ParameterError, PreconditionError
from .markov import MarkovPayoffs, field_p, field_v

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Lattice:
    """Recombining +-1/sqrt(n) walk over n periods of length 1/n."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ParameterError("lattice period count must be an integer >= 1")

    def node_value(self, level: int, m: int) -> float:
        if not 0 <= level <= self.n or not 0 <= m <= level:
            raise ParameterError("node index outside the lattice")
        return (2 * m - level) / math.sqrt(self.n)

    def level_values(self, level: int) -> np.ndarray:
        if not 0 <= level <= self.n:
            raise ParameterError("level outside the lattice")
        return (2 * np.arange(level + 1) - level) / math.sqrt(self.n)

    def leaf_values_from(self, level: int, m: int) -> np.ndarray:
        """Terminal factor levels reachable from node (level, m)."""
        if not 0 <= level <= self.n or not 0 <= m <= level:
            raise ParameterError("node index outside the lattice")
        remaining = self.n - level
        ups = np.arange(remaining + 1)
        return (2 * (m + ups) - self.n) / math.sqrt(self.n)

    def leaf_log_weights_from(self, level: int) -> np.ndarray:
        """Log binomial weights of the leaves from any node at this level."""
        remaining = self.n - level
        ups = np.arange(remaining + 1)
        return (
            gammaln(remaining + 1.0)
            - gammaln(ups + 1.0)
            - gammaln(remaining - ups + 1.0)
            - remaining * _LOG2
        )


@dataclass(frozen=True)
class DpScenario:
    """Lattice, terminal payoff data, admissible inventory interval, scan resolution."""

    lattice: Lattice
    payoffs: MarkovPayoffs
    admissible: Tuple[float, float]
    y_resolution: float = 1e-3

    def __post_init__(self):
        lo, hi = self.admissible
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ParameterError("admissible interval must be finite with lo < hi")
        if not lo <= 0.0 <= hi:
            raise ParameterError("admissible interval must contain 0")
        if not 0.0 < self.y_resolution <= (hi - lo):
            raise ParameterError("y_resolution must lie in (0, hi - lo]")

    @property
    def agents(self):
        return self.payoffs.agents

    def y_grid(self) -> np.ndarray:
        lo, hi = self.admissible
        count = int(round((hi - lo) / self.y_resolution)) + 1
        return np.linspace(lo, hi, count)


def _ce_from_logweights(values: np.ndarray, logw: np.ndarray, aversion: float) -> float:
    if aversion == 0.0:
        return float(np.exp(logw) @ values)
    if math.isinf(aversion):
        return float(values.min())
    with np.errstate(over="ignore"):
        out = -logsumexp(logw - aversion * values) / aversion
    if not math.isfinite(out):
        raise OverflowError("conditional certainty equivalent overflowed")
    return float(out)


def conditional_ce(
    scenario: DpScenario, level: int, m: int, terminal_fn: Callable, aversion: float
) -> float:
    """Certainty equivalent of terminal_fn(W_1) over the leaves below (level, m)."""
    leaves = scenario.lattice.leaf_values_from(level, m)
    logw = scenario.lattice.leaf_log_weights_from(level)
    vals = np.asarray(terminal_fn(leaves), dtype=float)
    return _ce_from_logweights(vals, logw, aversion)


def conditional_pi(scenario: DpScenario, level: int, m: int, terminal_fn: Callable) -> float:
    """Supplier conditional indifference value (aversion gamma) at a node."""
    return conditional_ce(scenario, level, m, terminal_fn, scenario.agents.gamma)


def _one_step_ce(up: np.ndarray, down: np.ndarray, aversion: float):
    """CE over one fair coin flip; vectorized over trailing shape."""
    if aversion == 0.0:
        return 0.5 * (up + down)
    if math.isinf(aversion):
        return np.minimum(up, down)
    return -(np.logaddexp(-aversion * up, -aversion * down) - _LOG2) / aversion


def _pi_menu(gamma: float, y: np.ndarray, g_vals, s_vals, logw) -> np.ndarray:
    """Pi(G - y*S) at one node for every y in the scan grid."""
    payoff = g_vals[None, :] - y[:, None] * s_vals[None, :]
    if gamma == 0.0:
        return payoff @ np.exp(logw)
    return -logsumexp(logw[None, :] - gamma * payoff, axis=1) / gamma


def _golden_max(f: Callable[[float], float], lo: float, hi: float, iters: int = 70):
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def sup_convolution(
    scenario: DpScenario,
    level: int,
    continuation: np.ndarray,
    refine: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """One backward step: from the composed field at level+1 to level.

    For each node, maximizes over the post-trade inventory y the sum of the
    demander's one-step CE of (continuation - Pi_child(G - y*S)) and the
    supplier's one-step CE of Pi_child(G - y*S).
    """
    lat = scenario.lattice
    if not 0 <= level < lat.n:
        raise ParameterError("sup_convolution level must lie in [0, n)")
    continuation = np.asarray(continuation, dtype=float)
    if continuation.shape != (level + 2,):
        raise ParameterError("continuation must hold one value per node at level+1")
    agents = scenario.agents
    gamma, c = agents.gamma, agents.c
    y = scenario.y_grid()
    logw = lat.leaf_log_weights_from(level + 1)

    child_g, child_s, menus = [], [], []
    for mc in range(level + 2):
        leaves = lat.leaf_values_from(level + 1, mc)
        g_vals = np.asarray(scenario.payoffs.g_fn(leaves), dtype=float)
        s_vals = np.asarray(scenario.payoffs.s_fn(leaves), dtype=float)
        child_g.append(g_vals)
        child_s.append(s_vals)
        menus.append(_pi_menu(gamma, y, g_vals, s_vals, logw))

    values = np.empty(level + 1)
    policies = np.empty(level + 1)
    for m in range(level + 1):
        pi_dn, pi_up = menus[m], menus[m + 1]
        objective = _one_step_ce(
            continuation[m + 1] - pi_up, continuation[m] - pi_dn, c
        ) + _one_step_ce(pi_up, pi_dn, gamma)
        best = objective.max()
        ties = np.nonzero(objective == best)[0]
        j = min(ties, key=lambda k: (abs(y[k]), 0.0 if y[k] < 0.0 else 1.0))
        y_best, val_best = float(y[j]), float(objective[j])
        if refine:
            lo = float(y[max(j - 1, 0)])
            hi = float(y[min(j + 1, y.size - 1)])

            def scalar_objective(yy: float) -> float:
                p_up = _pi_menu(gamma, np.array([yy]), child_g[m + 1], child_s[m + 1], logw)[0]
                p_dn = _pi_menu(gamma, np.array([yy]), child_g[m], child_s[m], logw)[0]
                step_u = _one_step_ce(
                    np.asarray(continuation[m + 1] - p_up),
                    np.asarray(continuation[m] - p_dn),
                    c,
                )
                step_pi = _one_step_ce(np.asarray(p_up), np.asarray(p_dn), gamma)
                return float(step_u + step_pi)

            y_ref, val_ref = _golden_max(scalar_objective, lo, hi)
            if val_ref >= val_best:
                y_best, val_best = y_ref, val_ref
        values[m] = val_best
        policies[m] = y_best
    return values, policies


@dataclass(frozen=True)
class DpValue:
    """Composed-field recursion output: root value net of Pi_0(G), the field
    F_k per level, per-node policies, and the root supplier value Pi_0(G)."""

    value: float
    fields: List[np.ndarray]
    policies: List[np.ndarray]
    pi0_g: float


def value_recursion(scenario: DpScenario, refine: bool = True) -> DpValue:
    """Backward induction as a composition of one-step sup-convolutions.

    F_n = (g+h)(leaves); F_k = one sup-convolution of F_{k+1}; the demander
    value is F_0(root) - Pi_0(G).
    """
    lat = scenario.lattice
    leaves = lat.level_values(lat.n)
    terminal = np.asarray(scenario.payoffs.g_fn(leaves), dtype=float) + np.asarray(
        scenario.payoffs.h_fn(leaves), dtype=float
    )
    fields: List[np.ndarray] = [None] * (lat.n + 1)
    policies: List[np.ndarray] = [None] * lat.n
    fields[lat.n] = terminal
    current = terminal
    for level in range(lat.n - 1, -1, -1):
        current, pol = sup_convolution(scenario, level, current, refine=refine)
        fields[level] = current
        policies[level] = pol
    pi0_g = conditional_pi(scenario, 0, 0, scenario.payoffs.g_fn)
    return DpValue(
        value=float(current[0]) - pi0_g,
        fields=fields,
        policies=policies,
        pi0_g=pi0_g,
    )


@dataclass(frozen=True)
class NoRebalanceReport:
    y_star: float
    is_buy_and_hold: bool
    value_gap: float
    max_policy_deviation: float


def no_rebalance_check(scenario: DpScenario, refine: bool = True) -> NoRebalanceReport:
    """For endowments with G - y*S proportional to G + H, verify buy-and-hold.

    Solves g - y*s = (c/(c+gamma)) * (g+h) pointwise on the leaves for a single
    y_star (PreconditionError if none exists or it is inadmissible), then checks
    the recursion's policy sits at y_star everywhere and that the root value
    equals the aggregate CE of G + H minus Pi_0(G).
    """
    lat = scenario.lattice
    leaves = lat.level_values(lat.n)
    g_vals = np.asarray(scenario.payoffs.g_fn(leaves), dtype=float)
    s_vals = np.asarray(scenario.payoffs.s_fn(leaves), dtype=float)
    h_vals = np.asarray(scenario.payoffs.h_fn(leaves), dtype=float)
    weight = scenario.agents.demander_weight
    target = weight * (g_vals + h_vals)
    movable = np.abs(s_vals) > 1e-14
    if not movable.any():
        raise PreconditionError("security payoff vanishes on every leaf")
    y_star = float((g_vals[movable][0] - target[movable][0]) / s_vals[movable][0])
    mismatch = np.max(np.abs(g_vals - y_star * s_vals - target))
    if mismatch > 1e-10:
        raise PreconditionError(
            f"endowment is not proportional: pointwise residual {mismatch:.3e}"
        )
    lo, hi = scenario.admissible
    if not lo <= y_star <= hi:
        raise PreconditionError(f"buy-and-hold position {y_star} is inadmissible")

    result = value_recursion(scenario, refine=refine)
    max_dev = max(
        float(np.max(np.abs(pol - y_star))) for pol in result.policies
    )
    abar = scenario.agents.aggregate_aversion
    aggregate_ce = conditional_ce(
        scenario, 0, 0, lambda w: np.asarray(scenario.payoffs.g_fn(w), dtype=float)
        + np.asarray(scenario.payoffs.h_fn(w), dtype=float), abar
    )
    gap = result.value - (aggregate_ce - result.pi0_g)
    return NoRebalanceReport(
        y_star=y_star,
        is_buy_and_hold=bool(max_dev <= scenario.y_resolution),
        value_gap=float(gap),
        max_policy_deviation=float(max_dev),
    )


def emm_eipu(scenario: DpScenario, level: int, m: int) -> float:
    """Efficient price at a node: E[S exp(-abar*(G+H))] / E[exp(-abar*(G+H))]."""
    lat = scenario.lattice
    leaves = lat.leaf_values_from(level, m)
    logw = lat.leaf_log_weights_from(level)
    g_vals = np.asarray(scenario.payoffs.g_fn(leaves), dtype=float)
    s_vals = np.asarray(scenario.payoffs.s_fn(leaves), dtype=float)
    h_vals = np.asarray(scenario.payoffs.h_fn(leaves), dtype=float)
    exponent = logw - scenario.agents.aggregate_aversion * (g_vals + h_vals)
    exponent = exponent - exponent.max()
    tilted = np.exp(exponent)
    return float((s_vals @ tilted) / tilted.sum())


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    value: float
    error: float


def convergence_study(
    scenario: DpScenario,
    n_list: Sequence[int],
    limit: Optional[float] = None,
    refine: bool = True,
    order: int = 128,
) -> List[ConvergenceRow]:
    """Root DP value against the continuous-market limit for each lattice size.

    The limit defaults to v(0, 0) - p(0, 0, 0) from the Markov quadrature
    fields of the same payoff data.
    """
    if limit is None:
        limit = field_v(scenario.payoffs, 0.0, 0.0, order) - field_p(
            scenario.payoffs, 0.0, 0.0, 0.0, order
        )
    rows = []
    for n in n_list:
        sub = DpScenario(
            lattice=Lattice(int(n)),
            payoffs=scenario.payoffs,
            admissible=scenario.admissible,
            y_resolution=scenario.y_resolution,
        )
        value = value_recursion(sub, refine=refine).value
        error = abs(value - limit)
        if not math.isfinite(error):
            raise PreconditionError(f"non-finite convergence error at n={n}")
        rows.append(ConvergenceRow(n=int(n), value=value, error=error))
    return rows
