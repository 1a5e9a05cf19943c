"""
Matrix-free operators with matvec accounting.

An :class:`OperatorHandle` wraps a :class:`scipy.sparse.linalg.LinearOperator` and a
:class:`MatvecCounter`; every :meth:`OperatorHandle.apply` increments the counter by one.
Several handles (for instance the frozen ``G_n`` of successive time slabs) may share one
counter so that a run reports a single total.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import math
from typing import Any, NamedTuple, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from utils.exceptions import DimensionMismatch, NonFinite
from utils.kernels import SpectralSegment


SPECTRAL_MARGIN: float = 0.05


class MatvecCounter:
    """Monotone count of operator applications."""

    def __init__(self) -> None:
        self._count = 0

    def __repr__(self) -> str:
        return f'MatvecCounter({self._count})'

    @property
    def count(self) -> int:
        return self._count

    def increment(self, value: int = 1) -> None:
        self._count += value


class OperatorHandle:
    """
    Counted action of a linear operator.

    :param operator: the operator, anything :func:`scipy.sparse.linalg.aslinearoperator`
        accepts.
    :type operator: Any
    :param counter: shared counter, a new one when omitted.
    :type counter: Optional[MatvecCounter]
    :param context: parameters the operator was built from (e.g. the freezing time).
    :type context: Any
    """

    def __init__(self, operator: Any, counter: Optional[MatvecCounter] = None, context: Any = None) -> None:
        self._operator: LinearOperator = aslinearoperator(operator)
        rows, cols = self._operator.shape
        if rows != cols:
            raise DimensionMismatch('Error@OperatorHandle.__init__.', f'operator is not square: {rows}x{cols}')
        self._counter = counter if counter is not None else MatvecCounter()
        self._context = context

    def __repr__(self) -> str:
        return f'OperatorHandle(N={self.dimension}, matvecs={self.matvecs}, context={self._context!r})'

    @property
    def dimension(self) -> int:
        return int(self._operator.shape[0])

    @property
    def counter(self) -> MatvecCounter:
        return self._counter

    @property
    def matvecs(self) -> int:
        return self._counter.count

    @property
    def context(self) -> Any:
        return self._context

    @property
    def operator(self) -> LinearOperator:
        return self._operator

    def apply(self, v: np.ndarray) -> np.ndarray:
        """
        Applies the operator once.

        :param v: vector of length ``N``.
        :type v: np.ndarray
        :raises DimensionMismatch: if ``v`` has the wrong length.
        :return: the operator action.
        :rtype: np.ndarray
        """
        v = np.asarray(v)
        if v.shape != (self.dimension,):
            raise DimensionMismatch('Error@OperatorHandle.apply.',
                                    f'expected a vector of length {self.dimension}, got shape {v.shape}')
        self._counter.increment()
        return np.asarray(self._operator.matvec(v)).reshape(self.dimension)

    __call__ = apply


class ScaledOperator:
    """
    ``X = (-2i G - (a + b) I) / (b - a)``, which maps an eigenvalue ``i lambda`` of ``G`` with
    ``lambda`` in ``[a, b]`` onto ``[-1, 1]``.
    """

    def __init__(self, base: OperatorHandle, segment: SpectralSegment) -> None:
        if not segment.b - segment.a > 0:
            raise ValueError('Error@ScaledOperator.__init__.', f'degenerate segment {segment}')
        self._base = base
        self._segment = segment
        self._scale = 1.0 / (segment.b - segment.a)
        self._shift = segment.a + segment.b

    @property
    def base(self) -> OperatorHandle:
        return self._base

    @property
    def segment(self) -> SpectralSegment:
        return self._segment

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self._scale * (-2j * self._base.apply(v) - self._shift * v)

    __call__ = apply


def apply(op: OperatorHandle, v: np.ndarray) -> np.ndarray:
    """One counted application of ``op`` to ``v``."""
    return op.apply(v)


def dense_operator(matrix: np.ndarray,
                   counter: Optional[MatvecCounter] = None,
                   context: Any = None) -> OperatorHandle:
    """
    Counted handle of a dense square matrix.

    :Example:

    >>> dense_operator([[2.0]]).apply(np.array([3.0]))
    array([6.])
    """
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch('Error@dense_operator.', f'matrix is not square: {matrix.shape}')
    return OperatorHandle(matrix, counter=counter, context=context)


def scaled_apply(sop: ScaledOperator, v: np.ndarray) -> np.ndarray:
    return sop.apply(v)


def check_finite(v: np.ndarray, owner: str, what: str = 'state') -> np.ndarray:
    """Raises :class:`NonFinite` if ``v`` holds ``nan`` or ``inf``."""
    if not np.all(np.isfinite(v)):
        raise NonFinite(owner, f'non-finite values in the {what}')
    return v


class SpectralDescriptor(NamedTuple):
    """
    What the analytic spectral bounds of a Fourier-grid model depend on.

    ``derivative_order`` 1 is the advection operator ``G = d/dx``; order 2 is the
    Schrodinger form ``G = -iH``, ``H = -1/2 d^2/dx^2 + V`` with ``V`` in
    ``[v_min, v_max]`` over the run.
    """
    n: int
    length: float
    derivative_order: int
    v_min: float = 0.0
    v_max: float = 0.0


def max_wavenumber(n: int, length: float) -> float:
    """``pi / dx`` of an ``n``-point periodic grid of the given length."""
    return math.pi * n / length


def hamiltonian_bounds(descriptor: SpectralDescriptor) -> Tuple[float, float]:
    """
    Real interval enclosing the spectrum of ``H`` (no margin).

    :raises ValueError: for a first-order descriptor.
    """
    if descriptor.derivative_order != 2:
        raise ValueError('Error@hamiltonian_bounds.', 'only second order (Schrodinger) models have an H')
    k_max = max_wavenumber(descriptor.n, descriptor.length)
    return descriptor.v_min, 0.5 * k_max ** 2 + descriptor.v_max


def fourier_spectral_bounds(descriptor: SpectralDescriptor, margin: float = SPECTRAL_MARGIN) -> SpectralSegment:
    """
    Analytic enclosure ``i[a, b]`` of the spectrum of ``G`` for a Fourier pseudospectral
    model, widened by ``margin`` of each end's magnitude.

    :param descriptor: grid and potential range of the model.
    :type descriptor: SpectralDescriptor
    :param margin: relative safety margin, defaults to 0.05
    :type margin: float, optional
    :return: the segment.
    :rtype: SpectralSegment
    """
    if descriptor.derivative_order == 1:
        k_max = max_wavenumber(descriptor.n, descriptor.length)
        segment = SpectralSegment(-k_max, k_max)
    elif descriptor.derivative_order == 2:
        e_min, e_max = hamiltonian_bounds(descriptor)
        segment = SpectralSegment(-e_max, -e_min)
    else:
        raise ValueError('Error@fourier_spectral_bounds.',
                         f'unsupported derivative order {descriptor.derivative_order}')
    return segment.widened(margin)
