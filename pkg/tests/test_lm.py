import numpy as np
import pytest

from optomech_budget.lm import levenberg_marquardt

x = np.linspace(0, 4, 60)


def exp_residual(p):
    return p[0] * np.exp(-p[1] * x) - 2.5 * np.exp(-1.3 * x)


def exp_jacobian(p):
    return np.column_stack([np.exp(-p[1] * x), -p[0] * x * np.exp(-p[1] * x)])


def test_recovers_exponential():
    res = levenberg_marquardt(exp_residual, exp_jacobian, [1.0, 0.5], [0, 0], [10, 10])
    assert res.converged
    np.testing.assert_allclose(res.params, [2.5, 1.3], rtol=1e-8)


def test_accepted_costs_decrease():
    res = levenberg_marquardt(exp_residual, exp_jacobian, [8.0, 4.0], [0, 0], [10, 10])
    hist = np.array(res.cost_history)
    assert np.all(np.diff(hist) < 0)


def test_rosenbrock():
    def r(p):
        return np.array([10 * (p[1] - p[0] ** 2), 1 - p[0]])

    def j(p):
        return np.array([[-20 * p[0], 10.0], [-1.0, 0.0]])

    res = levenberg_marquardt(r, j, [-1.2, 1.0], [-5, -5], [5, 5])
    assert res.converged
    np.testing.assert_allclose(res.params, [1.0, 1.0], atol=1e-6)


def test_bounds_are_respected():
    res = levenberg_marquardt(exp_residual, exp_jacobian, [1.0, 0.5], [0, 0], [2.0, 10])
    assert res.params[0] == pytest.approx(2.0)
    assert res.params[0] <= 2.0


def test_iteration_cap():
    res = levenberg_marquardt(exp_residual, exp_jacobian, [8.0, 4.0], [0, 0], [10, 10], max_iter=2)
    assert res.iterations == 2
    assert not res.converged


def test_covariance_matches_linear_regression():
    rng = np.random.default_rng(1)
    A = np.column_stack([np.ones_like(x), x])
    y = A @ [1.0, 2.0] + 0.1 * rng.standard_normal(x.size)
    res = levenberg_marquardt(lambda p: A @ p - y, lambda p: A, [0.0, 0.0], [-10, -10], [10, 10])
    resid = A @ res.params - y
    expected = np.linalg.inv(A.T @ A) * (resid @ resid) / (x.size - 2)
    np.testing.assert_allclose(res.covariance(), expected, rtol=1e-6)
