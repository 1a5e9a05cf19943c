"""
Tests for counted operators, the scaled operator and the analytic spectral bounds.
"""

import numpy as np
import pytest

from utils.exceptions import DimensionMismatch, NonFinite
from utils.kernels import SpectralSegment
from utils.models import AdvectionProblem, GPEProblem, OscillatorProblem
from utils.operators import (MatvecCounter, OperatorHandle, ScaledOperator, SpectralDescriptor, apply,
                             check_finite, dense_operator, fourier_spectral_bounds, hamiltonian_bounds,
                             scaled_apply)


def dense_matrix(handle: OperatorHandle) -> np.ndarray:
    """Columns ``G e_j``; costs ``N`` matvecs."""
    return np.array([handle.apply(e) for e in np.eye(handle.dimension, dtype=complex)]).T


class TestOperatorHandle:

    def test_identity(self):
        op = dense_operator(np.eye(3))
        v = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(apply(op, v), v)
        assert op.matvecs == 1

    def test_zero(self):
        op = dense_operator(np.zeros((4, 4)))
        assert not np.any(op(np.ones(4)))

    def test_dense_example(self):
        np.testing.assert_array_equal(dense_operator([[2.0]]).apply(np.array([3.0])), [6.0])
        op = dense_operator([[0, 1], [-1, 0]])
        np.testing.assert_array_equal(op.apply(np.array([1.0, 2.0])), [2.0, -1.0])

    def test_counts_every_application(self):
        op = dense_operator(np.diag([1.0, 2.0]))
        for _ in range(5):
            op.apply(np.ones(2))
        assert op.matvecs == 5
        assert op.counter.count == 5

    def test_shared_counter(self):
        counter = MatvecCounter()
        first = dense_operator(np.eye(2), counter=counter, context=0.5)
        second = dense_operator(2 * np.eye(2), counter=counter)
        first.apply(np.ones(2))
        second.apply(np.ones(2))
        second.apply(np.ones(2))
        assert counter.count == 3
        assert first.matvecs == second.matvecs == 3
        assert first.context == 0.5

    def test_dimension_mismatch(self):
        op = dense_operator(np.eye(3))
        with pytest.raises(DimensionMismatch):
            op.apply(np.ones(4))
        assert op.matvecs == 0
        with pytest.raises(DimensionMismatch):
            dense_operator(np.ones((2, 3)))

    def test_check_finite(self):
        with pytest.raises(NonFinite):
            check_finite(np.array([1.0, np.inf]), 'Error@test.')
        v = np.ones(3)
        assert check_finite(v, 'Error@test.') is v


class TestScaledOperator:

    def test_maps_segment_onto_unit_interval(self):
        """Eigenvalues i lambda with lambda in [a, b] land in [-1, 1]."""
        segment = SpectralSegment(-1.0, 3.0)
        op = dense_operator(np.diag(1j * np.array([-1.0, 3.0, 1.0])))
        sop = ScaledOperator(op, segment)
        np.testing.assert_allclose(scaled_apply(sop, np.ones(3)), [-1.0, 1.0, 0.0], atol=1e-15)
        assert op.matvecs == 1
        assert sop.base is op
        assert sop.segment == segment


class TestSpectralBounds:

    def test_advection(self):
        segment = fourier_spectral_bounds(SpectralDescriptor(32, 2 * np.pi, 1))
        assert segment.a == pytest.approx(-16.8)
        assert segment.b == pytest.approx(16.8)

    def test_free_particle(self):
        segment = fourier_spectral_bounds(SpectralDescriptor(128, 20.0, 2))
        assert segment.a == pytest.approx(-212.2, abs=0.05)
        assert segment.b == 0.0

    def test_hamiltonian_bounds(self):
        e_min, e_max = hamiltonian_bounds(SpectralDescriptor(128, 20.0, 2, -1.0, 60.0))
        assert e_min == -1.0
        assert e_max == pytest.approx(0.5 * (np.pi * 128 / 20.0) ** 2 + 60.0)
        with pytest.raises(ValueError):
            hamiltonian_bounds(SpectralDescriptor(32, 1.0, 1))

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            fourier_spectral_bounds(SpectralDescriptor(32, 1.0, 3))

    def test_encloses_advection_spectrum(self):
        problem = AdvectionProblem(n=32)
        eigenvalues = np.linalg.eigvals(dense_matrix(problem.operator))
        assert problem.segment.contains(eigenvalues)

    @pytest.mark.parametrize('t', [0.0, 1.7, 7.5])
    def test_encloses_oscillator_spectrum(self, t):
        problem = OscillatorProblem(n=32, T=15.0)
        eigenvalues = np.linalg.eigvals(dense_matrix(problem.frozen_operator(t, problem.initial_state)))
        assert problem.segment.contains(eigenvalues)

    def test_encloses_gpe_spectrum(self):
        problem = GPEProblem(n=32)
        eigenvalues = np.linalg.eigvals(dense_matrix(problem.frozen_operator(0.0, problem.initial_state)))
        assert problem.segment.contains(eigenvalues)

    def test_contains_rejects_outside(self):
        segment = SpectralSegment(-1.0, 1.0)
        assert not segment.contains(np.array([2j]))
        assert not segment.contains(np.array([0.5 + 0.1j]))
