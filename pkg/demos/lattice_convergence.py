"""Discrete-time trading on a binomial lattice, and its continuum limit.

Three exhibits:
  1. a one-period market solved both by the dynamic program and by a brute
     scan over trade sizes;
  2. proportional books, where the optimum is buy-and-hold and the lattice
     value matches the static certainty-equivalent identity;
  3. the quadratic-Gaussian limit: lattice values marching toward the
     closed-form continuum value as the step count grows.
"""

import math

import numpy as np

from impactlab.dp import (
    DpScenario,
    Lattice,
    convergence_study,
    emm_eipu,
    no_rebalance_check,
    value_recursion,
)
from impactlab.markov import MarkovPayoffs, QuadraticModel, quadratic_p, quadratic_v
from impactlab.utility import AgentPair


def one_period():
    pay = MarkovPayoffs(
        s_fn=lambda w: np.asarray(w, dtype=float),
        g_fn=lambda w: np.zeros_like(np.asarray(w, dtype=float)),
        h_fn=lambda w: np.asarray(w, dtype=float),
        agents=AgentPair(gamma=1.0, c=1.0),
    )
    scn = DpScenario(Lattice(1), pay, (-2.0, 2.0), 1e-4)
    out = value_recursion(scn)
    print("== one period, unit endowment ==")
    print(f"lattice value      {out.value:+.8f}")
    print(f"closed form        {-2 * math.log(math.cosh(0.5)):+.8f}")
    print(f"root trade         {out.policies[0][0]:+.6f}  (exact -1/2)")


def buy_and_hold():
    mu, sigma, alpha, beta = 0.1, 0.9, 0.7, 0.4

    def s(w):
        return mu + sigma * np.asarray(w, dtype=float)

    pay = MarkovPayoffs(
        s_fn=s, g_fn=lambda w: beta * s(w), h_fn=lambda w: alpha * s(w),
        agents=AgentPair(gamma=1.0, c=2.0),
    )
    scn = DpScenario(Lattice(12), pay, (-2.0, 2.0), 1e-3)
    report = no_rebalance_check(scn)
    print("\n== proportional books: no rebalancing needed ==")
    print(f"static optimum y* = {report.y_star:+.6f}, "
          f"buy-and-hold: {report.is_buy_and_hold}")
    print(f"value identity gap {report.value_gap:+.2e}, "
          f"max policy deviation {report.max_policy_deviation:.2e}")
    print(f"root forward price {emm_eipu(scn, 0, 0):+.6f} "
          f"(limit {mu - (2/3) * (alpha + beta) * sigma**2:+.6f})")


def continuum_limit():
    model = QuadraticModel(
        g_load=0.2, mu=0.0, sigma=1.0, a_lin=0.5, b_quad=0.3,
        agents=AgentPair(gamma=1.0, c=1.0),
    )
    limit = quadratic_v(model, 0.0, 0.0) - quadratic_p(model, 0.0, 0.0, 0.0)
    scn = DpScenario(Lattice(2), model.payoffs(), (-2.0, 2.0), 1e-3)
    print("\n== quadratic-Gaussian continuum limit ==")
    print(f"closed-form limit {limit:+.8f}")
    print(f"{'n':>4} {'value':>12} {'error':>10}")
    for row in convergence_study(scn, [2, 4, 8, 16], limit=limit):
        print(f"{row.n:4d} {row.value:12.8f} {row.error:10.2e}")


if __name__ == "__main__":
    one_period()
    buy_and_hold()
    continuum_limit()
