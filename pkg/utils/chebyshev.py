"""
Chebyshev algebra in time: Chebyshev-Lobatto slabs, the sample/coefficient cosine
transform, the conversion of a Chebyshev series to the Taylor-like form
``sum_j tau^j / j! s_j`` and barycentric interpolation of node values.

Minimal requirements
--------------------
* Python 3.8
* numpy, scipy
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.fft import dct
from scipy.interpolate import BarycentricInterpolator

from utils.exceptions import ConditioningError, DimensionMismatch


logger = logging.getLogger(__name__)

# Chebyshev -> monomial conversion grows ill-conditioned quickly with m
MAX_TAYLOR_ORDER: int = 16


@dataclass(frozen=True)
class TimeSlab:
    """
    A time slab ``[t_start, t_start + dt]`` with ``m`` Chebyshev-Lobatto nodes.

    The nodes are ``t_start + dt/2 (1 - y_j)``, ``y_j = cos(j pi / (m - 1))``, so that they
    ascend from ``t_start`` to ``t_start + dt``; the end nodes are exact.

    :param t_start: start of the slab.
    :type t_start: float
    :param dt: slab length, ``dt > 0``.
    :type dt: float
    :param m: node count, ``m >= 2``.
    :type m: int
    """
    t_start: float
    dt: float
    m: int
    offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 2:
            raise ValueError('Error@TimeSlab.', f'node count m must be an integer >= 2, got {self.m!r}')
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError('Error@TimeSlab.', f'slab length dt must be positive, got {self.dt!r}')
        m = int(self.m)
        # sin form keeps y_j = -y_{m-1-j} exactly
        y = np.sin(np.pi * (m - 1 - 2 * np.arange(m)) / (2 * (m - 1)))
        offsets = 0.5 * self.dt * (1.0 - y)
        offsets[0] = 0.0
        offsets[-1] = self.dt
        offsets.setflags(write=False)
        object.__setattr__(self, 'm', m)
        object.__setattr__(self, 'offsets', offsets)

    @property
    def nodes(self) -> np.ndarray:
        """Absolute node times."""
        nodes = self.t_start + self.offsets
        nodes[0] = self.t_start
        nodes[-1] = self.t_start + self.dt
        return nodes

    @property
    def t_end(self) -> float:
        return self.t_start + self.dt

    @property
    def midpoint(self) -> float:
        return self.t_start + 0.5 * self.dt

    def next(self) -> 'TimeSlab':
        """The adjacent slab of the same length."""
        return TimeSlab(self.t_start + self.dt, self.dt, self.m)


@dataclass(frozen=True)
class TaylorSourceSet:
    """
    The source in Taylor-like form ``s(tau) = sum_j tau^j / j! s_j``, ``tau = t - t_start``.

    :ivar vectors: array of shape ``(m, N)``, row ``j`` is ``s_j``.
    """
    vectors: np.ndarray

    @property
    def m(self) -> int:
        return int(self.vectors.shape[0])

    def __call__(self, tau: float) -> np.ndarray:
        """Evaluates the polynomial at the local offset ``tau``."""
        weights = np.array([tau ** j / math.factorial(j) for j in range(self.m)])
        return weights @ self.vectors


def make_time_slab(t_start: float, dt: float, m: int) -> TimeSlab:
    """
    :Example:

    >>> make_time_slab(0.0, 1.0, 3).nodes
    array([0. , 0.5, 1. ])
    """
    return TimeSlab(float(t_start), float(dt), m)


def _stack(values: Union[np.ndarray, Sequence[np.ndarray]], owner: str) -> np.ndarray:
    try:
        array = np.asarray(values)
    except ValueError as e:
        raise DimensionMismatch(owner, 'vectors have different lengths') from e
    if array.dtype == object:
        raise DimensionMismatch(owner, 'vectors have different lengths')
    if array.ndim == 1:
        array = array[:, None]
    return array


def samples_to_cheb(values: Union[np.ndarray, Sequence[np.ndarray]]) -> np.ndarray:
    """
    Chebyshev coefficients in ``y in [-1, 1]`` of the degree ``m - 1`` interpolant of the
    samples at the slab nodes (type-I cosine transform, halved end weights).

    :param values: ``m`` equally long vectors, ordered as the slab nodes.
    :type values: Union[np.ndarray, Sequence[np.ndarray]]
    :raises DimensionMismatch: if the vectors differ in length.
    :raises ValueError: if fewer than two samples are given.
    :return: array of shape ``(m, N)``.
    :rtype: np.ndarray
    """
    samples = _stack(values, 'Error@samples_to_cheb.')
    m = samples.shape[0]
    if m < 2:
        raise ValueError('Error@samples_to_cheb.', f'need at least 2 samples, got {m}')
    if np.iscomplexobj(samples):
        coeffs = dct(samples.real, type=1, axis=0) + 1j * dct(samples.imag, type=1, axis=0)
    else:
        coeffs = dct(samples, type=1, axis=0)
    coeffs /= m - 1
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5
    return coeffs


@lru_cache(maxsize=256)
def _taylor_matrix(m: int, dt: float) -> np.ndarray:
    """Row ``n`` holds ``j! [tau^j] T_n(1 - 2 tau / dt)``."""
    matrix = np.zeros((m, m))
    for n in range(m):
        coef = Chebyshev.basis(n, domain=[dt, 0.0]).convert(kind=Polynomial).coef
        matrix[n, :coef.size] = coef[:m]
    matrix *= np.array([math.factorial(j) for j in range(m)], dtype=float)
    matrix.setflags(write=False)
    return matrix


def cheb_to_taylor(coeffs: Union[np.ndarray, Sequence[np.ndarray]], dt: float) -> TaylorSourceSet:
    """
    Rewrites ``sum_n c_n T_n(y(tau))`` with ``y(tau) = 1 - 2 tau / dt`` as
    ``sum_j tau^j / j! s_j``.

    :param coeffs: ``m`` coefficient vectors.
    :type coeffs: Union[np.ndarray, Sequence[np.ndarray]]
    :param dt: slab length.
    :type dt: float
    :raises ConditioningError: if ``m`` exceeds the conditioning guard.
    :return: the Taylor-like source set.
    :rtype: TaylorSourceSet
    """
    array = _stack(coeffs, 'Error@cheb_to_taylor.')
    m = array.shape[0]
    if m > MAX_TAYLOR_ORDER:
        logger.warning('Chebyshev to monomial conversion with m=%d is ill-conditioned (limit %d)',
                       m, MAX_TAYLOR_ORDER)
        raise ConditioningError('Error@cheb_to_taylor.',
                                f'm={m} exceeds the conversion limit {MAX_TAYLOR_ORDER}')
    if not dt > 0:
        raise ValueError('Error@cheb_to_taylor.', f'dt must be positive, got {dt!r}')
    return TaylorSourceSet(_taylor_matrix(m, float(dt)).T @ array)


def barycentric_eval(slab: TimeSlab,
                     values: Union[np.ndarray, Sequence[np.ndarray]],
                     t: Union[float, np.ndarray]) -> np.ndarray:
    """
    Degree ``m - 1`` interpolation of the node values at ``t``; exact at the nodes.
    Mild extrapolation (``t`` within one slab length outside) is accepted.

    :param slab: the slab the values belong to.
    :type slab: TimeSlab
    :param values: ``m`` node values (vectors or scalars).
    :type values: Union[np.ndarray, Sequence[np.ndarray]]
    :param t: absolute time(s).
    :type t: Union[float, np.ndarray]
    :return: interpolated value(s).
    :rtype: np.ndarray
    """
    array = np.asarray(values)
    if array.shape[0] != slab.m:
        raise DimensionMismatch('Error@barycentric_eval.',
                                f'expected {slab.m} node values, got {array.shape[0]}')
    interpolator = BarycentricInterpolator(slab.nodes, array, axis=0)
    return interpolator(np.asarray(t, dtype=float))
