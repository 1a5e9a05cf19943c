"""
Tests for the Runge-Kutta reference integrators.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import random_hermitian
from utils.exceptions import StepUnderflow
from utils.reference import DP_A, DP_B, DP_C, DP_E, RK4Config, RK45Config, rk4_propagate, rk45_propagate


def decay(t, u):
    return -u


class TestRK4:

    def test_constant_solution(self):
        u_T, report = rk4_propagate(lambda t, u: np.zeros_like(u), np.array([1.0, 2.0]), 3.0, RK4Config(steps=25))
        np.testing.assert_array_equal(u_T, [1.0, 2.0])
        assert report.matvecs == 100
        assert report.method == 'rk4'
        assert report.steps == 25

    def test_exponential_decay(self):
        u_T, _ = rk4_propagate(decay, np.array([1.0]), 1.0, RK4Config(steps=100))
        assert abs(u_T[0] - math.exp(-1.0)) <= 1e-9

    def test_fourth_order(self):
        errors = [abs(rk4_propagate(decay, np.array([1.0]), 1.0, RK4Config(steps=steps))[0][0] - math.exp(-1.0))
                  for steps in (10, 20)]
        assert 13.0 <= errors[0] / errors[1] <= 19.0

    def test_time_dependent_rhs(self):
        """u' = cos(t) u has the solution exp(sin t)."""
        u_T, _ = rk4_propagate(lambda t, u: math.cos(t) * u, np.array([1.0]), 2.0, RK4Config(steps=1000))
        assert u_T[0].real == pytest.approx(math.exp(math.sin(2.0)), rel=1e-9)

    def test_invalid_steps(self):
        with pytest.raises(ValueError):
            RK4Config(steps=0)


class TestRK45:

    def test_tableau(self):
        """Rows of the stage matrix sum to the nodes; both weight sets are consistent."""
        for c, row in zip(DP_C, DP_A):
            assert sum(row) == pytest.approx(c, abs=1e-15)
        assert DP_B.sum() == pytest.approx(1.0, abs=1e-15)
        assert DP_E.sum() == pytest.approx(0.0, abs=1e-15)

    def test_exponential_decay(self):
        u_T, report = rk45_propagate(decay, np.array([1.0]), 2.0, RK45Config(abs_tol=1e-12, rel_tol=1e-12))
        assert abs(u_T[0] - math.exp(-2.0)) <= 1e-10
        assert report.method == 'rk45'
        assert report.accepted == report.steps
        assert report.matvecs == 1 + 6 * (report.accepted + report.rejected)

    def test_unitary_system(self, rng):
        h = random_hermitian(rng, 8, 5.0)
        u0 = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        u_T, report = rk45_propagate(lambda t, u: -1j * (h @ u), u0, 3.0, RK45Config(abs_tol=1e-11, rel_tol=1e-11))
        np.testing.assert_allclose(u_T, expm(-3j * h) @ u0, atol=1e-7)
        assert report.accepted > 0

    def test_tolerance_reduces_error(self):
        errors = []
        for tol in (1e-5, 1e-9):
            u_T, _ = rk45_propagate(lambda t, u: math.cos(t) * u, np.array([1.0]), 6.0,
                                    RK45Config(abs_tol=tol, rel_tol=tol))
            errors.append(abs(u_T[0] - math.exp(math.sin(6.0))))
        assert errors[1] < errors[0]
        assert errors[1] <= 1e-7

    def test_initial_step(self):
        _, fixed = rk45_propagate(decay, np.array([1.0]), 1.0, RK45Config(initial_step=1e-3))
        assert fixed.accepted >= 1

    def test_blow_up_underflows(self):
        """u' = u^2 leaves every step size behind at t = 1."""
        with pytest.raises(StepUnderflow):
            rk45_propagate(lambda t, u: u ** 2, np.array([1.0]), 2.0, RK45Config())

    def test_step_limit(self):
        with pytest.raises(StepUnderflow):
            rk45_propagate(decay, np.array([1.0]), 100.0, RK45Config(abs_tol=1e-12, rel_tol=1e-12, max_steps=3))

    @pytest.mark.parametrize('kwargs', [{'abs_tol': 0.0}, {'rel_tol': -1.0}, {'initial_step': 0.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            RK45Config(**kwargs)
