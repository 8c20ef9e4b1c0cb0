import math

import numpy as np
import pytest

from delayoco.errors import NumericalError, ParameterError
from delayoco.geometry import Ball, project
from delayoco.losses import (
    LossOracle,
    QuadraticLoss,
    check_smoothness,
    check_strong_convexity,
    gradient_mapping,
    offline_optimum,
    pgd_comparator_oracle,
    sample_quadratic,
    sample_quadratics,
    total_loss,
)


def ball_points(rng, m, n, radius=1.0):
    z = rng.normal(size=(m, n))
    return radius * z / np.linalg.norm(z, axis=1, keepdims=True) * rng.uniform(size=(m, 1)) ** (1 / n)


def test_sampling_is_deterministic():
    a = sample_quadratic(np.random.default_rng(42), 10)
    b = sample_quadratic(np.random.default_rng(42), 10)
    np.testing.assert_array_equal(a.b, b.b)


def test_sampled_entries_in_unit_box():
    losses = sample_quadratics(np.random.default_rng(3), 500, 10)
    assert all(np.all(np.abs(f.b) <= 1.0) for f in losses)


def test_seed_sweep_mean_near_zero():
    b = np.array([sample_quadratic(np.random.default_rng(seed), 10).b for seed in range(10_000)])
    assert np.all(np.abs(b.mean(axis=0)) <= 0.02)


def test_sample_rejects_zero_dimension():
    with pytest.raises(ParameterError):
        sample_quadratic(np.random.default_rng(0), 0)


def test_quadratic_constants():
    f = QuadraticLoss(np.zeros(10))
    assert (f.beta, f.alpha) == (2.0, 2.0)
    assert f.lipschitz == pytest.approx(2 + math.sqrt(10))


def test_quadratic_value_batches():
    f = QuadraticLoss(np.array([1.0, -1.0]))
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, 0.1]])
    np.testing.assert_allclose(f.value(pts), [0.0, 0.11, -0.09])


def test_offline_optimum_boundary_case():
    b = np.zeros(10)
    b[0] = 2.0
    comp = offline_optimum([QuadraticLoss(b)], Ball(1))
    expected = np.zeros(10)
    expected[0] = -1.0
    np.testing.assert_allclose(comp.x_star, expected, atol=1e-15)
    assert comp.total_loss == pytest.approx(-1.0, abs=1e-15)
    oracle = pgd_comparator_oracle([QuadraticLoss(b)], Ball(1), iters=200)
    np.testing.assert_allclose(oracle.x_star, expected, atol=1e-6)
    x = oracle.x_star
    assert np.linalg.norm(gradient_mapping([QuadraticLoss(b)], Ball(1), x, 0.5)) <= 1e-10


def test_offline_optimum_zero_and_cancelling():
    comp = offline_optimum([QuadraticLoss(np.zeros(4))] * 3, Ball(1))
    np.testing.assert_array_equal(comp.x_star, np.zeros(4))
    assert comp.total_loss == 0.0
    comp = offline_optimum([QuadraticLoss(np.array([1.0, 0.0])), QuadraticLoss(np.array([-1.0, 0.0]))], Ball(1))
    np.testing.assert_array_equal(comp.x_star, np.zeros(2))
    assert comp.total_loss == 0.0


def test_offline_optimum_requires_losses():
    with pytest.raises(ParameterError):
        offline_optimum([], Ball(1))
    with pytest.raises(ParameterError):
        pgd_comparator_oracle([], Ball(1))


def test_pgd_zero_b_converges_to_origin():
    comp = pgd_comparator_oracle([QuadraticLoss(np.zeros(3))] * 5, Ball(1), iters=50)
    np.testing.assert_allclose(comp.x_star, 0.0, atol=1e-12)


def test_pgd_convergence_certificate():
    losses = sample_quadratics(np.random.default_rng(7), 100, 10)
    comp = pgd_comparator_oracle(losses, Ball(1), iters=500)
    step = 1.0 / sum(f.beta for f in losses)
    assert np.linalg.norm(gradient_mapping(losses, Ball(1), comp.x_star, step)) <= 1e-8


def test_pgd_matches_closed_form_on_random_instances():
    rng = np.random.default_rng(11)
    for _ in range(50):
        T = int(rng.integers(1, 40))
        n = int(rng.integers(1, 12))
        # scale b so that both interior and boundary optima occur
        scale = rng.choice([0.2, 1.0, 5.0])
        losses = [QuadraticLoss(scale * rng.uniform(-1, 1, n)) for _ in range(T)]
        closed = offline_optimum(losses, Ball(1))
        oracle = pgd_comparator_oracle(losses, Ball(1), iters=300)
        assert np.linalg.norm(closed.x_star - oracle.x_star) <= 1e-6
        assert closed.total_loss <= oracle.total_loss + 1e-9


def test_comparator_dominates_sampled_points():
    rng = np.random.default_rng(5)
    losses = sample_quadratics(rng, 50, 6)
    comp = offline_optimum(losses, Ball(1))
    for x in ball_points(rng, 200, 6):
        assert comp.total_loss <= total_loss(losses, x) + 1e-12


def test_pgd_on_non_quadratic_oracle():
    # f(x) = sum_i cosh(x_i - c_i) is 1-strongly convex; minimiser c if inside the ball
    c = np.array([0.3, -0.2, 0.1])
    f = LossOracle(
        lambda x: float(np.sum(np.cosh(x - c))),
        lambda x: np.sinh(x - c),
        beta=1.0,
        alpha=math.cosh(2.0),
        lipschitz=3 * math.sinh(2.0),
        n=3,
    )
    comp = pgd_comparator_oracle([f] * 4, Ball(1), iters=20_000)
    np.testing.assert_allclose(comp.x_star, c, atol=1e-6)


def test_pgd_divergence_detected():
    # gradient with the wrong sign: every step climbs, ~290 steps before reaching the boundary
    f = LossOracle(lambda x: float(x @ x), lambda x: -2 * x, beta=2.0, n=2)
    with pytest.raises(NumericalError):
        pgd_comparator_oracle([f], Ball(1), iters=500, step_rule=lambda k: 0.05, x0=np.array([1e-12, 0.0]))


def test_pgd_needs_dimension_for_generic_oracle():
    f = LossOracle(lambda x: float(x @ x), lambda x: 2 * x, beta=2.0)
    with pytest.raises(ParameterError):
        pgd_comparator_oracle([f], Ball(1))


def test_strong_convexity_smoothness_lipschitz_on_samples():
    rng = np.random.default_rng(0)
    for _ in range(5):
        f = sample_quadratic(rng, 10)
        xs = ball_points(rng, 10_000, 10)
        ys = ball_points(rng, 10_000, 10)
        for x, y in zip(xs[:2000], ys[:2000]):
            assert check_strong_convexity(f, x, y) >= -1e-10
            assert check_smoothness(f, x, y) >= -1e-10
        # the same inequalities vectorised over all 10^4 pairs
        d = ys - xs
        lhs = f.value(ys) - f.value(xs) - np.einsum("ij,ij->i", f.gradient(xs), d)
        assert np.all(lhs - np.sum(d * d, axis=1) >= -1e-10)
        assert np.all(np.sum(d * d, axis=1) - lhs >= -1e-10)
        grads = f.gradient(xs)
        assert np.all(np.linalg.norm(grads, axis=1) <= f.lipschitz + 1e-12)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(1)
    h = 1e-6
    for _ in range(50):
        f = sample_quadratic(rng, 10)
        x = project(Ball(1), rng.normal(size=10))
        fd = np.array([(f.value(x + h * e) - f.value(x - h * e)) / (2 * h) for e in np.eye(10)])
        g = f.gradient(x)
        assert np.linalg.norm(fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))
