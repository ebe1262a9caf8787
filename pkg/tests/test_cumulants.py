"""Cumulant families: closed forms vs finite differences, domains, samplers."""

import math

import numpy as np
import pytest

from impactlab import (
    Brownian,
    DomainError,
    GammaProcess,
    NonDifferentiableError,
    OneSidedStable,
    ParameterError,
)

MODELS = [
    Brownian(b=0.5, sigma=1.0),
    Brownian(b=-0.2, sigma=0.3),
    GammaProcess(alpha=2.0, beta=1.0),
    GammaProcess(alpha=0.7, beta=3.5),
    OneSidedStable(r=1.0, alpha=0.5),
    OneSidedStable(r=2.3, alpha=0.8),
]


def interior(model, rng, count):
    if isinstance(model, Brownian):
        return rng.uniform(-4.0, 4.0, count)
    if isinstance(model, GammaProcess):
        return rng.uniform(-model.alpha * 0.9, 5.0, count)
    return rng.uniform(0.05, 5.0, count)


def test_kappa_closed_form_anchors():
    # frozen closed-form evaluations
    assert Brownian(b=0.5, sigma=1.0).kappa(2.0) == pytest.approx(-1.0, abs=1e-15)
    assert Brownian(b=0.0, sigma=1.0).kappa(-0.5) == pytest.approx(-0.125, abs=1e-15)
    assert GammaProcess(alpha=2.0, beta=1.0).kappa(2.0) == pytest.approx(
        0.6931471805599453, abs=1e-15
    )
    assert GammaProcess(alpha=2.0, beta=1.0).kappa_prime(0.5) == pytest.approx(
        0.4, abs=1e-15
    )
    assert OneSidedStable(r=1.0, alpha=0.5).kappa(4.0) == pytest.approx(2.0, abs=1e-15)
    assert OneSidedStable(r=1.0, alpha=0.5).kappa_prime(1.0) == pytest.approx(
        0.5, abs=1e-15
    )
    assert OneSidedStable(r=1.0, alpha=0.5).kappa_double_prime(1.0) == pytest.approx(
        -0.25, abs=1e-15
    )


def test_kappa_zero_and_concavity():
    rng = np.random.default_rng(11)
    for model in MODELS:
        assert model.kappa(0.0) == 0.0
        u = np.sort(interior(model, rng, 60))
        # midpoint value above the chord -> concave
        mid = model.kappa(0.5 * (u[:-1] + u[1:]))
        chord = 0.5 * (model.kappa(u[:-1]) + model.kappa(u[1:]))
        assert np.all(mid >= chord - 1e-12)
        assert np.all(model.kappa_double_prime(u) <= 1e-15)


def test_derivatives_match_finite_differences():
    rng = np.random.default_rng(12)
    for model in MODELS:
        for u in interior(model, rng, 100):
            step = 1e-5 * max(1.0, abs(u))
            fd1 = (model.kappa(u + step) - model.kappa(u - step)) / (2 * step)
            fd2 = (
                model.kappa(u + step) - 2 * model.kappa(u) + model.kappa(u - step)
            ) / step**2
            assert model.kappa_prime(u) == pytest.approx(fd1, rel=1e-6, abs=1e-8)
            assert model.kappa_double_prime(u) == pytest.approx(fd2, rel=1e-4, abs=1e-5)


def test_array_and_scalar_shapes():
    model = GammaProcess(alpha=2.0, beta=1.0)
    assert isinstance(model.kappa(1.0), float)
    out = model.kappa(np.array([0.0, 1.0, 2.0]))
    assert out.shape == (3,)
    assert out[0] == 0.0


def test_domains():
    gamma = GammaProcess(alpha=2.0, beta=1.0)
    assert gamma.domain_contains(-1.9)
    assert not gamma.domain_contains(-2.0)
    with pytest.raises(DomainError):
        gamma.kappa(-2.5)

    stable = OneSidedStable(r=1.0, alpha=0.5)
    assert stable.domain_contains(0.0)
    assert not stable.domain_contains(-1e-9)
    with pytest.raises(DomainError):
        stable.kappa(-1.0)
    # kappa itself is fine at the boundary, the one-sided slope is not
    assert stable.kappa(0.0) == 0.0
    with pytest.raises(NonDifferentiableError):
        stable.kappa_prime(0.0)
    with pytest.raises(NonDifferentiableError):
        stable.kappa_double_prime(0.0)

    brownian = Brownian(b=0.0, sigma=1.0)
    assert brownian.domain_contains(-1e6) and brownian.domain_contains(1e6)


def test_means():
    assert Brownian(b=0.7, sigma=0.2).mean() == pytest.approx(0.7)
    assert GammaProcess(alpha=2.0, beta=3.0).mean() == pytest.approx(1.5)
    with pytest.raises(NonDifferentiableError):
        OneSidedStable(r=1.0, alpha=0.5).mean()


def test_parameter_validation():
    with pytest.raises(ParameterError):
        Brownian(b=0.0, sigma=-1.0)
    with pytest.raises(ParameterError):
        GammaProcess(alpha=0.0, beta=1.0)
    with pytest.raises(ParameterError):
        GammaProcess(alpha=1.0, beta=-2.0)
    with pytest.raises(ParameterError):
        OneSidedStable(r=0.0, alpha=0.5)
    with pytest.raises(ParameterError):
        OneSidedStable(r=1.0, alpha=1.0)
    with pytest.raises(ParameterError):
        OneSidedStable(r=1.0, alpha=0.0)


def laplace_zscore(model, u, dt, n_draws, seed):
    # Monte Carlo check of E[exp(-u dX)] = exp(-dt kappa(u))
    rng = np.random.default_rng(seed)
    draws = model.sample_increments(rng, dt, n_draws)
    vals = np.exp(-u * draws)
    target = math.exp(-dt * model.kappa(u))
    se = vals.std(ddof=1) / math.sqrt(n_draws)
    return (vals.mean() - target) / se


def test_sampler_laplace_transforms():
    # the transform identity pins the sampler normalization for every family
    cases = [
        (Brownian(b=0.3, sigma=1.2), (0.5, 1.0, -0.7)),
        (GammaProcess(alpha=2.0, beta=1.0), (0.5, 1.0, 3.0)),
        (OneSidedStable(r=1.0, alpha=0.5), (0.5, 1.0, 3.0)),
        (OneSidedStable(r=1.5, alpha=0.75), (0.5, 2.0, 4.0)),
    ]
    for model, us in cases:
        for dt in (1.0, 0.125):
            for u in us:
                z = laplace_zscore(model, u, dt, 100_000, seed=77)
                assert abs(z) < 4.0, (model, u, dt, z)


def test_sampler_moments_and_positivity():
    rng = np.random.default_rng(21)
    draws = Brownian(b=1.0, sigma=2.0).sample_increments(rng, 0.25, 50_000)
    assert draws.mean() == pytest.approx(0.25, abs=4 * 2.0 * 0.5 / math.sqrt(50_000))
    assert draws.var(ddof=1) == pytest.approx(1.0, rel=0.05)

    draws = GammaProcess(alpha=2.0, beta=3.0).sample_increments(rng, 0.5, 50_000)
    assert np.all(draws >= 0.0)
    assert draws.mean() == pytest.approx(0.75, rel=0.03)

    draws = OneSidedStable(r=1.0, alpha=0.5).sample_increments(rng, 0.1, 50_000)
    assert np.all(draws > 0.0)


def test_sampler_determinism():
    model = OneSidedStable(r=1.0, alpha=0.6)
    a = model.sample_increments(np.random.default_rng(5), 0.5, 64)
    b = model.sample_increments(np.random.default_rng(5), 0.5, 64)
    assert np.array_equal(a, b)
