"""
Tests for the time-slab Chebyshev algebra.
"""

import math

import numpy as np
import pytest
from numpy.polynomial import chebyshev

from utils.chebyshev import (MAX_TAYLOR_ORDER, TimeSlab, barycentric_eval, cheb_to_taylor, make_time_slab,
                             samples_to_cheb)
from utils.exceptions import ConditioningError, DimensionMismatch


def local_y(slab: TimeSlab) -> np.ndarray:
    return 1.0 - 2.0 * slab.offsets / slab.dt


class TestTimeSlab:

    def test_two_nodes(self):
        np.testing.assert_array_equal(make_time_slab(0.0, 1.0, 2).nodes, [0.0, 1.0])

    def test_three_nodes(self):
        np.testing.assert_allclose(make_time_slab(0.0, 1.0, 3).nodes, [0.0, 0.5, 1.0], atol=1e-16)

    def test_shifted_slab(self):
        slab = make_time_slab(2.0, 0.5, 5)
        nodes = slab.nodes
        assert nodes[0] == 2.0
        assert nodes[-1] == 2.5
        assert nodes[2] == pytest.approx(2.25, abs=1e-15)
        assert np.all(np.diff(nodes) > 0)
        assert slab.midpoint == 2.25
        assert slab.t_end == 2.5

    def test_symmetric_offsets(self):
        slab = make_time_slab(0.0, 3.0, 8)
        np.testing.assert_allclose(slab.offsets + slab.offsets[::-1], 3.0, atol=1e-14)

    def test_next(self):
        slab = make_time_slab(1.0, 0.25, 4).next()
        assert slab.t_start == 1.25
        assert slab.m == 4

    def test_invalid(self):
        with pytest.raises(ValueError):
            make_time_slab(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            make_time_slab(0.0, 0.0, 4)


class TestSamplesToCheb:

    def test_single_polynomial(self):
        """Samples of T_2 give the unit coefficient vector e_2."""
        slab = make_time_slab(0.0, 1.0, 5)
        values = chebyshev.chebval(local_y(slab), [0, 0, 1])
        coeffs = samples_to_cheb(values)
        np.testing.assert_allclose(coeffs[:, 0], [0, 0, 1, 0, 0], atol=1e-14)

    def test_recovers_interpolant(self, rng):
        slab = make_time_slab(0.0, 0.7, 8)
        expected = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
        values = np.array([chebyshev.chebval(y, expected) for y in local_y(slab)])
        np.testing.assert_allclose(samples_to_cheb(values), expected, atol=1e-13)

    def test_mismatched_vectors(self):
        with pytest.raises(DimensionMismatch):
            samples_to_cheb([np.zeros(3), np.zeros(4)])

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            samples_to_cheb(np.zeros((1, 3)))


class TestChebToTaylor:

    def test_cosine_derivatives(self):
        """The Taylor-like vectors of cos on [0, 0.5] are its derivatives at 0."""
        slab = make_time_slab(0.0, 0.5, 12)
        src = cheb_to_taylor(samples_to_cheb(np.cos(slab.nodes)), slab.dt)
        derivatives = [math.cos(math.pi * j / 2) for j in range(4)]
        np.testing.assert_allclose(src.vectors[:4, 0], derivatives, atol=1e-8)

    def test_evaluates_source(self, rng):
        slab = make_time_slab(0.0, 0.5, 12)
        src = cheb_to_taylor(samples_to_cheb(np.cos(slab.nodes)), slab.dt)
        for tau in rng.uniform(0, 0.5, 10):
            assert src(tau)[0] == pytest.approx(math.cos(tau), abs=1e-13)

    def test_exact_for_polynomials(self):
        slab = make_time_slab(0.0, 2.0, 4)
        src = cheb_to_taylor(samples_to_cheb(slab.nodes ** 3 - slab.nodes), slab.dt)
        np.testing.assert_allclose(src.vectors[:, 0], [0.0, -1.0, 0.0, 6.0], atol=1e-12)

    def test_conditioning_guard(self):
        coeffs = np.zeros((MAX_TAYLOR_ORDER + 1, 2))
        with pytest.raises(ConditioningError):
            cheb_to_taylor(coeffs, 1.0)
        with pytest.raises(ValueError):
            cheb_to_taylor(coeffs, 1.0)

    def test_guard_limit_accepted(self):
        src = cheb_to_taylor(np.zeros((MAX_TAYLOR_ORDER, 2)), 1.0)
        assert src.m == MAX_TAYLOR_ORDER


class TestBarycentricEval:

    def test_cubic_is_exact(self):
        slab = make_time_slab(1.0, 2.0, 5)
        values = np.stack([slab.nodes ** 3, 2 * slab.nodes], axis=1)
        np.testing.assert_allclose(barycentric_eval(slab, values, 2.3), [2.3 ** 3, 4.6], rtol=1e-12)

    def test_nodes_are_reproduced(self, rng):
        slab = make_time_slab(0.0, 0.3, 6)
        values = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
        for j, t in enumerate(slab.nodes):
            np.testing.assert_allclose(barycentric_eval(slab, values, t), values[j], atol=1e-13)

    def test_extrapolation(self):
        slab = make_time_slab(0.0, 1.0, 4)
        assert barycentric_eval(slab, slab.nodes ** 2, 1.5) == pytest.approx(2.25, rel=1e-12)

    def test_wrong_count(self):
        with pytest.raises(DimensionMismatch):
            barycentric_eval(make_time_slab(0.0, 1.0, 4), np.zeros((3, 2)), 0.5)
