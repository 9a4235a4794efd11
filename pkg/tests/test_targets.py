import numpy as np
import pytest

import affinemc as am
from helpers import finite_difference_gradient, run_chain


def test_gaussian_eigenvalue_progression():
    tgt = am.DiagonalGaussian.with_condition(2, 1000)
    assert np.allclose(tgt.precisions, [0.1, 100.0])
    tgt = am.DiagonalGaussian.with_condition(1, 1000)
    assert np.allclose(tgt.precisions, [0.1])
    full = am.DiagonalGaussian.with_condition(8, 50)
    assert np.allclose(np.diff(full.precisions), np.diff(full.precisions)[0])
    assert full.precisions[0] == pytest.approx(0.1)
    assert full.precisions[-1] == pytest.approx(5.0)


def test_gaussian_values_and_gradient():
    tgt = am.DiagonalGaussian.with_condition(3, 10)
    assert tgt.log_density(np.zeros(3)) == 0.0
    assert np.array_equal(tgt.grad_log_density(np.zeros(3)), np.zeros(3))
    one_d = am.DiagonalGaussian(np.array([0.1]))
    assert one_d.log_density(np.array([2.0])) == pytest.approx(-0.2)
    assert one_d.grad_log_density(np.array([2.0]))[0] == pytest.approx(-0.2)


def test_gaussian_whitening_gives_isotropic_log_density():
    tgt = am.DiagonalGaussian.with_condition(5, 100)
    x = np.random.default_rng(0).standard_normal(5)
    whitened = x / np.sqrt(tgt.precisions)
    assert tgt.log_density(whitened) == pytest.approx(-0.5 * np.sum(x * x), rel=1e-12)


def test_ring_values():
    tgt = am.Ring(4, 0.25)
    on_shell = np.array([0.5, 0.5, 0.5, 0.5])
    assert tgt.log_density(on_shell) == pytest.approx(0.0)
    origin = np.zeros(4)
    assert tgt.log_density(origin) == pytest.approx(-16.0)
    assert np.array_equal(tgt.grad_log_density(origin), np.zeros(4))


def test_allen_cahn_values():
    for d in (2, 5, 64):
        tgt = am.AllenCahn(d)
        assert tgt.log_density(np.ones(d)) == pytest.approx(0.0)
        assert tgt.log_density(np.zeros(d)) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        am.AllenCahn(1)


@pytest.mark.parametrize("make,rel_tol,scale", [
    (lambda: am.DiagonalGaussian.with_condition(8, 100), 1e-5, 1.0),
    (lambda: am.Ring(8, 0.25), 1e-6, 0.5),
    (lambda: am.AllenCahn(16), 1e-5, 1.0),
])
def test_gradients_match_finite_differences(make, rel_tol, scale):
    tgt = make()
    r = np.random.default_rng(42)
    for _ in range(50):
        x = scale * r.standard_normal(tgt.dim)
        got = tgt.grad_log_density(x)
        want = finite_difference_gradient(tgt, x)
        denom = max(float(np.linalg.norm(want)), 1e-8)
        assert np.linalg.norm(got - want) / denom <= rel_tol


def test_batched_evaluation_matches_rows():
    tgt = am.Ring(3, 0.5)
    pts = np.random.default_rng(1).standard_normal((7, 3))
    batch_lp = tgt.log_density(pts)
    batch_g = tgt.grad_log_density(pts)
    for i in range(7):
        assert batch_lp[i] == tgt.log_density(pts[i])
        assert np.array_equal(batch_g[i], tgt.grad_log_density(pts[i]))


def test_dimension_mismatch_raises():
    tgt = am.DiagonalGaussian.standard(3)
    with pytest.raises(ValueError):
        tgt.log_density(np.zeros(4))
    with pytest.raises(ValueError):
        tgt.grad_log_density(np.zeros((5, 2)))


def test_path_integral_constant_linear_quadratic():
    assert am.path_integral(np.full(17, 3.25)) == pytest.approx(3.25, rel=1e-14)
    grid = np.linspace(0.0, 1.0, 33)
    assert am.path_integral(grid) == pytest.approx(0.5, rel=1e-14)
    # composite trapezoid of x^2 is exactly 1/3 + dx^2/6
    d = 101
    dx = 1.0 / (d - 1)
    grid = np.linspace(0.0, 1.0, d)
    expected = 1.0 / 3.0 + dx * dx / 6.0
    assert am.path_integral(grid**2) == pytest.approx(expected, rel=1e-12)
    assert am.path_integral(grid**2) == pytest.approx(0.33335, abs=5e-6)
    with pytest.raises(ValueError):
        am.path_integral(np.ones(1))


def test_translation_of_log_density_does_not_change_chains():
    base = am.DiagonalGaussian.with_condition(3, 30)

    class Shifted(am.Target):
        dim = 3

        def log_density(self, x):
            return base.log_density(x) + 17.25

        def grad_log_density(self, x):
            return base.grad_log_density(x)

    plan = am.RngPlan(13)
    x0 = plan.normal_block(0, np.arange(8), am.INIT, 3)
    for move in (am.SideMove(), am.Hmc(2, total_time=1.0)):
        a = run_chain(move, base, plan, am.Ensemble(x0), 200)
        b = run_chain(move, Shifted(), plan, am.Ensemble(x0), 200)
        assert np.allclose(a.ensemble.walkers, b.ensemble.walkers, rtol=1e-12, atol=1e-12)


def test_pushforward_gradient_consistency():
    base = am.Ring(4, 0.5)
    amap = am.AffineMap(np.eye(4) + 0.2 * np.random.default_rng(3).standard_normal((4, 4)),
                        np.array([0.5, -1.0, 0.0, 2.0]))
    pushed = am.PushforwardTarget(base, amap)
    y = np.random.default_rng(4).standard_normal(4)
    got = pushed.grad_log_density(y)
    want = finite_difference_gradient(pushed, y)
    assert np.allclose(got, want, rtol=1e-5, atol=1e-7)


def test_counting_target_counts_points():
    tgt = am.CountingTarget(am.DiagonalGaussian.standard(2))
    tgt.log_density(np.zeros(2))
    tgt.log_density(np.zeros((5, 2)))
    tgt.grad_log_density(np.zeros((3, 2)))
    assert tgt.n_density_evals == 6
    assert tgt.n_grad_evals == 3
    tgt.reset_counts()
    assert tgt.n_density_evals == 0 and tgt.n_grad_evals == 0


def test_make_target_registry():
    assert isinstance(am.make_target({"target": "gaussian", "d": 4, "kappa": 10}),
                      am.DiagonalGaussian)
    assert isinstance(am.make_target({"target": "standard_gaussian", "d": 4}),
                      am.DiagonalGaussian)
    ring = am.make_target({"target": "ring", "d": 50, "l": 0.25})
    assert isinstance(ring, am.Ring) and ring.width == 0.25
    assert isinstance(am.make_target({"target": "allen_cahn", "d": 64}), am.AllenCahn)
    with pytest.raises(ValueError):
        am.make_target({"target": "cauchy", "d": 2})
    with pytest.raises(ValueError):
        am.DiagonalGaussian(np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        am.Ring(3, width=0.0)
