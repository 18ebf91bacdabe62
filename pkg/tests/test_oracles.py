"""Noise oracles: exactness of realized magnitudes, statistics, determinism."""

from __future__ import annotations

import numpy as np
import pytest

import agmnoise as ag
from agmnoise.core import Problem
from agmnoise.oracles import minibatch_gradient


def test_sphere_noise_zero_magnitude():
    out = ag.sphere_noise(ag.RngStream(1), 7, 0.0)
    assert np.array_equal(out, np.zeros(7))


def test_sphere_noise_norm_exact():
    out = ag.sphere_noise(ag.RngStream(2), 3, 2.0)
    assert np.linalg.norm(out) == pytest.approx(2.0, abs=1e-12)


def test_sphere_noise_unbiased_monte_carlo():
    rng = ag.RngStream(3)
    n, trials = 5, 100_000
    acc = np.zeros(n)
    for _ in range(trials):
        acc += ag.sphere_noise(rng, n, 1.0)
    mean = acc / trials
    assert np.all(np.abs(mean) <= 4.0 / np.sqrt(trials))


def test_sphere_noise_rejects_bad_dim():
    with pytest.raises(ValueError):
        ag.sphere_noise(ag.RngStream(0), 0, 1.0)


def test_exact_oracle_diagonal_gradient():
    p = ag.diagonal_quadratic([0.01, 1.0])
    g = ag.oracle_gradient(ag.Exact(), p, np.array([1.0, 1.0]), ag.RngStream(0))
    assert g == pytest.approx([0.01, 1.0], abs=0)


def test_relative_alpha_zero_is_exact():
    p = ag.diagonal_quadratic([0.5, 2.0])
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.normal(size=2)
        g0 = ag.oracle_gradient(ag.Exact(), p, x, ag.RngStream(1))
        g1 = ag.oracle_gradient(ag.Relative(0.0), p, x, ag.RngStream(1))
        assert np.array_equal(g0, g1)


def test_absolute_noise_norm_is_delta_every_draw():
    p = ag.diagonal_quadratic([0.5, 2.0, 1.0])
    rng = ag.RngStream(4)
    x = np.array([1.0, -2.0, 0.5])
    g_true = ag.gradient(p, x)
    for _ in range(1000):
        g = ag.oracle_gradient(ag.Absolute(0.1), p, x, rng)
        assert np.linalg.norm(g - g_true) == pytest.approx(0.1, abs=1e-12)


def test_relative_noise_norm_is_alpha_grad_norm():
    p = ag.diagonal_quadratic([0.5, 2.0, 1.0])
    rng = ag.RngStream(5)
    x = np.array([1.0, -2.0, 0.5])
    g_true = ag.gradient(p, x)
    target = 0.3 * np.linalg.norm(g_true)
    for _ in range(200):
        g = ag.oracle_gradient(ag.Relative(0.3), p, x, rng)
        assert np.linalg.norm(g - g_true) == pytest.approx(target, rel=1e-12)


def test_relative_noise_vanishes_at_stationary_point():
    p = ag.diagonal_quadratic([0.5, 2.0])
    g = ag.oracle_gradient(ag.Relative(0.9), p, np.zeros(2), ag.RngStream(6))
    assert np.array_equal(g, np.zeros(2))


def test_relative_rejects_alpha_above_one():
    with pytest.raises(ValueError):
        ag.Relative(1.5)


def test_measured_relative_norm_is_alpha_times_reading():
    p = ag.diagonal_quadratic([0.5, 2.0, 1.0])
    rng = ag.RngStream(7)
    x = np.array([1.0, -2.0, 0.5])
    g_true = ag.gradient(p, x)
    for alpha in (0.2, 0.7, 0.95):
        g = ag.oracle_gradient(ag.MeasuredRelative(alpha), p, x, rng)
        assert np.linalg.norm(g - g_true) == pytest.approx(
            alpha * np.linalg.norm(g), rel=1e-10)
    assert np.array_equal(
        ag.oracle_gradient(ag.MeasuredRelative(0.9), p, np.zeros(3), rng),
        np.zeros(3))


def test_stochastic_oracle_moment_bounds():
    p = ag.diagonal_quadratic([0.5, 2.0, 1.0, 0.1])
    rng = ag.RngStream(8)
    x = np.array([1.0, -2.0, 0.5, 3.0])
    g_true = ag.gradient(p, x)
    delta = 0.4
    errs = np.array([
        ag.oracle_gradient(ag.Stochastic(delta), p, x, rng) - g_true
        for _ in range(20_000)
    ])
    mean = errs.mean(axis=0)
    second = float(np.mean(np.sum(errs ** 2, axis=1)))
    assert np.all(np.abs(mean) <= 5.0 * delta / np.sqrt(len(errs)))
    # magnitude u*delta with u uniform: E||e||^2 = delta^2 / 3 < delta^2
    assert second <= delta ** 2
    assert second == pytest.approx(delta ** 2 / 3.0, rel=0.05)


def test_identical_seeds_give_identical_noise_sequences():
    a, b = ag.RngStream(123), ag.RngStream(123)
    for _ in range(5):
        na = ag.sphere_noise(a, 6, 1.0)
        nb = ag.sphere_noise(b, 6, 1.0)
        assert np.array_equal(na, nb)
    c = ag.RngStream(124)
    assert not np.array_equal(ag.sphere_noise(a, 6, 1.0), ag.sphere_noise(c, 6, 1.0))


# -- finite differences ------------------------------------------------------


def test_finite_difference_exact_on_quadratic():
    p = ag.diagonal_quadratic([1.0, 2.0])
    g = ag.finite_difference_gradient(p, np.array([1.0, 1.0]), 1e-4, 0.0,
                                      ag.RngStream(0))
    assert g == pytest.approx([1.0, 2.0], abs=1e-7)


def test_finite_difference_quartic_curvature_term():
    # central difference of x^4 at x=1 with step h: 4 + 4 h^2 exactly
    p = Problem(dim=1, value=lambda x: float(x[0] ** 4),
                grad=lambda x: np.array([4.0 * x[0] ** 3]), lips=12.0)
    g = ag.finite_difference_gradient(p, np.array([1.0]), 0.1, 0.0, ag.RngStream(0))
    assert g[0] == pytest.approx(4.04, rel=1e-12)


def test_finite_difference_noise_error_bound():
    # value noise in [-delta_f, delta_f] perturbs each coordinate by at most
    # delta_f / h; on a quadratic the curvature term vanishes, so with
    # h = sqrt(delta_f) the error is at most sqrt(n * delta_f).
    p = ag.diagonal_quadratic([0.3, 1.0, 2.0])
    delta_f = 1e-6
    h = np.sqrt(delta_f)
    rng = ag.RngStream(9)
    x = np.array([0.4, -1.2, 2.0])
    g_true = ag.gradient(p, x)
    worst = 0.0
    for _ in range(100):
        g = ag.finite_difference_gradient(p, x, h, delta_f, rng)
        worst = max(worst, float(np.linalg.norm(g - g_true)))
    assert worst <= np.sqrt(p.dim) * delta_f / h * (1 + 1e-9)
    assert worst <= 2.0 * np.sqrt(p.dim) * np.sqrt(delta_f)


def test_finite_difference_oracle_variant_dispatch():
    p = ag.diagonal_quadratic([1.0, 2.0])
    g = ag.oracle_gradient(ag.FiniteDifference(h=1e-5), p, np.ones(2), ag.RngStream(0))
    assert g == pytest.approx([1.0, 2.0], abs=1e-6)


def test_constant_bias_oracle():
    p = ag.diagonal_quadratic([0.01, 1.0])
    bias = np.array([1e-3, 0.0])
    g = ag.oracle_gradient(ag.ConstantBias(bias), p, np.zeros(2), ag.RngStream(0))
    assert g == pytest.approx([-1e-3, 0.0], abs=0)


# -- mini-batching -----------------------------------------------------------


def _shifted_sum(M=8, dim=4, seed=21):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(M, dim))
    comps = [
        Problem(dim=dim,
                value=(lambda x, c=c: 0.5 * float(np.dot(x - c, x - c))),
                grad=(lambda x, c=c: x - c),
                lips=1.0, mu=1.0)
        for c in centers
    ]
    return ag.finite_sum(comps), centers


def test_minibatch_full_batch_is_exact():
    fsum, _ = _shifted_sum()
    x = np.ones(4)
    assert ag.minibatch_variance_estimate(fsum, x, 8, 100, ag.RngStream(0)) == 0.0
    g = minibatch_gradient(fsum, x, 8, ag.RngStream(0))
    assert g == pytest.approx(ag.gradient(fsum, x), abs=0)


def test_minibatch_variance_scaling_law():
    fsum, _ = _shifted_sum()
    x = np.ones(4)
    e1 = ag.minibatch_variance_estimate(fsum, x, 1, 10_000, ag.RngStream(1))
    e4 = ag.minibatch_variance_estimate(fsum, x, 4, 10_000, ag.RngStream(2))
    assert e1 / e4 == pytest.approx(4.0, rel=0.25)


def test_minibatch_variance_matches_second_moment_over_m():
    # at the average minimizer the component gradients sum to zero, so the
    # with-replacement estimate equals their empirical second moment over m
    fsum, centers = _shifted_sum()
    cbar = centers.mean(axis=0)
    grads = np.stack([c.grad(cbar) for c in fsum.components])
    sigma2 = float(np.mean(np.sum(grads ** 2, axis=1)))
    for m in (1, 2, 4):
        est = ag.minibatch_variance_estimate(fsum, cbar, m, 40_000, ag.RngStream(3))
        assert est == pytest.approx(sigma2 / m, rel=0.05)


def test_minibatch_errors():
    fsum, _ = _shifted_sum()
    p = ag.diagonal_quadratic([1.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        ag.oracle_gradient(ag.MiniBatch(2), p, np.zeros(4), ag.RngStream(0))
    with pytest.raises(ValueError):
        ag.minibatch_variance_estimate(fsum, np.zeros(4), 9, 10, ag.RngStream(0))
    with pytest.raises(ValueError):
        ag.minibatch_variance_estimate(fsum, np.zeros(4), 0, 10, ag.RngStream(0))
