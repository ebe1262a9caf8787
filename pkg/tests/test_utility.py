"""Certainty equivalents, agent pairs, and the Levy indifference prices."""

import math

import numpy as np
import pytest

from impactlab import (
    AgentPair,
    Brownian,
    DomainError,
    GammaProcess,
    OneSidedStable,
    ParameterError,
    SampleSet,
    aggregated_utility,
    cash_invariance_check,
    certainty_equivalent,
    levy_pi,
    levy_price_curve,
)


def test_agent_pair_composites():
    agents = AgentPair(gamma=1.0, c=1.0)
    assert agents.aggregate_aversion == pytest.approx(0.5)
    assert agents.demander_weight == pytest.approx(0.5)

    agents = AgentPair(gamma=1.0, c=3.0)
    assert agents.aggregate_aversion == pytest.approx(0.75)
    assert agents.demander_weight == pytest.approx(0.75)

    worst_case = AgentPair(gamma=2.0, c=math.inf)
    assert worst_case.aggregate_aversion == 2.0
    assert worst_case.demander_weight == 1.0

    neutral = AgentPair(gamma=0.0, c=5.0)
    assert neutral.aggregate_aversion == 0.0


def test_agent_pair_validation():
    with pytest.raises(ParameterError):
        AgentPair(gamma=-1.0, c=1.0)
    with pytest.raises(ParameterError):
        AgentPair(gamma=math.inf, c=1.0)
    with pytest.raises(ParameterError):
        AgentPair(gamma=1.0, c=0.0)
    with pytest.raises(ParameterError):
        AgentPair(gamma=1.0, c=-2.0)
    with pytest.raises(ParameterError):
        AgentPair(gamma=1.0, c=math.nan)


def test_sample_set_validation():
    with pytest.raises(ParameterError):
        SampleSet(np.array([1.0, 2.0]), np.array([0.5, 0.6]))
    with pytest.raises(ParameterError):
        SampleSet(np.array([1.0, math.inf]), np.array([0.5, 0.5]))
    with pytest.raises(ParameterError):
        SampleSet(np.array([1.0, 2.0]), np.array([-0.1, 1.1]))
    with pytest.raises(ParameterError):
        SampleSet(np.array([]), np.array([]))


def test_ce_anchor_values():
    two_point = SampleSet.uniform([1.0, -1.0])
    # constant -> itself, any aversion
    constant = SampleSet.uniform([2.5, 2.5, 2.5])
    for aversion in (0.0, 1.0, 7.0, math.inf):
        assert certainty_equivalent(constant, aversion) == pytest.approx(2.5, abs=1e-12)

    assert certainty_equivalent(two_point, 1.0) == pytest.approx(
        -math.log(math.cosh(1.0)), abs=1e-12
    )
    assert certainty_equivalent(two_point, 1.0) == pytest.approx(-0.433781, abs=1e-6)
    assert certainty_equivalent(two_point, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert certainty_equivalent(two_point, math.inf) == -1.0

    # composite aversion 1/2 on the same support
    agents = AgentPair(gamma=1.0, c=1.0)
    # exact value -0.24022901...; quoted roundings of it are only good to ~1e-4
    assert aggregated_utility(two_point, agents) == pytest.approx(
        -2.0 * math.log(math.cosh(0.5)), abs=1e-12
    )
    assert aggregated_utility(two_point, agents) == pytest.approx(-0.2402, abs=1e-4)

    worst = AgentPair(gamma=1.0, c=math.inf)
    assert aggregated_utility(two_point, worst) == pytest.approx(
        -math.log(math.cosh(1.0)), abs=1e-12
    )


def test_ce_brute_force_oracle():
    # direct sum evaluation without the log-sum-exp shift
    rng = np.random.default_rng(31)
    for _ in range(50):
        values = rng.normal(0.0, 1.0, 8)
        weights = rng.dirichlet(np.ones(8))
        samples = SampleSet(values, weights)
        for aversion in (0.3, 1.0, 4.0):
            brute = -math.log(float(weights @ np.exp(-aversion * values))) / aversion
            assert certainty_equivalent(samples, aversion) == pytest.approx(
                brute, abs=1e-12
            )


def test_ce_cash_invariance_and_monotonicity():
    rng = np.random.default_rng(32)
    for _ in range(40):
        samples = SampleSet.uniform(rng.normal(0.0, 2.0, 10))
        shift = float(rng.normal(0.0, 10.0))
        for aversion in (0.0, 0.5, 2.0, 10.0, math.inf):
            assert abs(cash_invariance_check(samples, aversion, shift)) < 1e-10
        levels = [0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0, math.inf]
        ces = [certainty_equivalent(samples, a) for a in levels]
        for lo, hi in zip(ces, ces[1:]):
            assert hi <= lo + 1e-12


def test_ce_concavity_in_values():
    # two-point mixtures of sample vectors: ce(mix) >= mix of ce
    rng = np.random.default_rng(33)
    for _ in range(40):
        v1, v2 = rng.normal(0.0, 1.5, (2, 6))
        weights = rng.dirichlet(np.ones(6))
        lam = float(rng.random())
        mixed = SampleSet(lam * v1 + (1 - lam) * v2, weights)
        part1 = SampleSet(v1, weights)
        part2 = SampleSet(v2, weights)
        for aversion in (0.4, 1.0, 5.0):
            lhs = certainty_equivalent(mixed, aversion)
            rhs = lam * certainty_equivalent(part1, aversion) + (
                1 - lam
            ) * certainty_equivalent(part2, aversion)
            assert lhs >= rhs - 1e-10


def test_ce_overflow_and_bad_aversion():
    samples = SampleSet.uniform([-1e308, 0.0])
    with pytest.raises(OverflowError):
        certainty_equivalent(samples, 10.0)
    with pytest.raises(ParameterError):
        certainty_equivalent(samples, -1.0)


def test_levy_pi_anchor():
    model = GammaProcess(alpha=2.0, beta=1.0)
    got = levy_pi(model, gamma=1.0, z=1.0, x_t=0.3, t=0.5)
    assert got == pytest.approx(0.3 + 0.5 * math.log(1.5), abs=1e-14)
    assert got == pytest.approx(0.502733, abs=1e-6)
    # t=1 collapses to mark-to-market
    assert levy_pi(model, 1.0, 2.0, x_t=0.7, t=1.0) == pytest.approx(1.4)
    # z=0 prices nothing
    assert levy_pi(model, 1.0, 0.0, x_t=0.7, t=0.2) == 0.0


def test_levy_pi_monte_carlo():
    # -(1/gamma) log E[exp(-gamma z X_1)], sampled
    cases = [
        (Brownian(b=0.2, sigma=1.0), 1.0, 0.8),
        (GammaProcess(alpha=2.0, beta=1.0), 0.7, 1.2),
        (OneSidedStable(r=1.0, alpha=0.5), 1.0, 0.9),
    ]
    rng = np.random.default_rng(34)
    for model, gamma, z in cases:
        draws = model.sample_increments(rng, 1.0, 200_000)
        vals = np.exp(-gamma * z * draws)
        est = -math.log(vals.mean()) / gamma
        se = vals.std(ddof=1) / math.sqrt(vals.size) / (gamma * vals.mean())
        assert levy_pi(model, gamma, z, 0.0, 0.0) == pytest.approx(est, abs=4 * se)


def test_levy_pi_gamma_zero_branch():
    model = Brownian(b=0.4, sigma=1.0)
    assert levy_pi(model, 0.0, 2.0, x_t=0.1, t=0.25) == pytest.approx(
        0.1 * 2.0 + 0.75 * 2.0 * 0.4
    )


def test_levy_pi_domain_error():
    model = GammaProcess(alpha=1.0, beta=1.0)
    with pytest.raises(DomainError):
        levy_pi(model, gamma=2.0, z=-1.0, x_t=0.0, t=0.0)


def test_price_curve_shape():
    model = GammaProcess(alpha=3.0, beta=1.0)
    rng = np.random.default_rng(35)
    gamma, a = 1.0, 0.5
    for _ in range(60):
        z = float(rng.uniform(-0.5, 1.0))
        t = float(rng.uniform(0.0, 1.0))
        x_t = float(rng.normal())
        assert levy_price_curve(model, gamma, a, z, 0.0, x_t, t) == 0.0
        ys = np.sort(rng.uniform(-1.0, 1.0, 3))
        # second divided difference >= 0 (convexity in the traded volume)
        p = [levy_price_curve(model, gamma, a, z, y, x_t, t) for y in ys]
        d1 = (p[1] - p[0]) / (ys[1] - ys[0])
        d2 = (p[2] - p[1]) / (ys[2] - ys[1])
        assert d2 >= d1 - 1e-10
        y = float(rng.uniform(0.0, 1.0))
        bid = -levy_price_curve(model, gamma, a, z, -y, x_t, t)
        ask = levy_price_curve(model, gamma, a, z, y, x_t, t)
        assert bid <= ask + 1e-12


def test_price_curve_risk_neutral_limit():
    # Brownian: curve -> y * (x_t + (1-t) b) linearly in gamma
    model = Brownian(b=0.3, sigma=1.0)
    a, z, y, x_t, t = 0.4, 0.2, 0.7, 0.15, 0.25
    line = y * (x_t + (1.0 - t) * model.b)
    err = {}
    for gamma in (1e-2, 1e-4):
        err[gamma] = abs(levy_price_curve(model, gamma, a, z, y, x_t, t) - line)
    assert err[1e-4] < err[1e-2] * 1.1e-2  # shrinks proportionally with gamma
    assert levy_price_curve(model, 0.0, a, z, y, x_t, t) == pytest.approx(line)
