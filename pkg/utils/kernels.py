"""
Scalar kernels of the propagator: the functions

    f_m(z, t) = z^-m (e^{zt} - sum_{j<m} (zt)^j / j!),      f_m(0, t) = t^m / m!

and the Chebyshev expansion of ``z -> f_m(z, t)`` over a segment ``i[a, b]`` of the
imaginary axis: the truncated series when ``k`` terms resolve it, a weighted least-squares
fit when a fixed ``k`` does not.

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
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.fft import dct

from utils.exceptions import NonFinite, TailTooLarge


logger = logging.getLogger(__name__)

# |zt| <= SWITCH_RATIO * m selects the Taylor branch
SWITCH_RATIO: float = 0.5
TAYLOR_RTOL: float = 1e-17
TAYLOR_MAX_TERMS: int = 60
TAIL_TOL: float = 1e-11
OVERSAMPLING: int = 4
# weighted fits: weight scale and sample points per term
STABILITY_WEIGHT: float = 1.5e-3
FIT_SAMPLES: int = 16


@dataclass(frozen=True)
class SpectralSegment:
    """
    The segment ``i[a, b]`` of the imaginary axis that encloses the spectrum of ``G``.

    :param a: lower end of the segment (imaginary part).
    :type a: float
    :param b: upper end of the segment (imaginary part).
    :type b: float
    :raises ValueError: if ``a >= b`` or an end is not finite.
    """
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError('Error@SpectralSegment.', f'non-finite end points ({self.a}, {self.b})')
        if self.a >= self.b:
            raise ValueError('Error@SpectralSegment.', f'expected a < b, got ({self.a}, {self.b})')

    @property
    def center(self) -> float:
        """Midpoint of the segment, ``(a + b) / 2``."""
        return 0.5 * (self.a + self.b)

    @property
    def half_width(self) -> float:
        """Half length of the segment, ``(b - a) / 2``."""
        return 0.5 * (self.b - self.a)

    def to_z(self, x: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
        """
        Maps ``x`` in ``[-1, 1]`` onto ``i[a, b]``.

        :param x: points of the reference interval.
        :type x: Union[float, np.ndarray]
        :return: ``z = i((b - a) x + (a + b)) / 2``.
        :rtype: Union[complex, np.ndarray]
        """
        return 1j * (self.half_width * np.asarray(x) + self.center)

    def contains(self, eigenvalues: np.ndarray, tol: float = 1e-9) -> bool:
        """
        Checks that every eigenvalue lies on ``i[a, b]`` (real parts within ``tol``).

        :param eigenvalues: eigenvalues of ``G``.
        :type eigenvalues: np.ndarray
        :param tol: absolute tolerance, defaults to 1e-9
        :type tol: float, optional
        :return: True if the segment encloses all of them.
        :rtype: bool
        """
        eigenvalues = np.asarray(eigenvalues)
        scale = max(abs(self.a), abs(self.b), 1.0)
        return bool(np.all(np.abs(eigenvalues.real) <= tol * scale)
                    and np.all(eigenvalues.imag >= self.a - tol * scale)
                    and np.all(eigenvalues.imag <= self.b + tol * scale))

    def widened(self, margin: float) -> 'SpectralSegment':
        """
        Returns the segment with both ends moved outwards by ``margin`` of their magnitude.

        :param margin: relative margin, e.g. 0.05.
        :type margin: float
        :return: the widened segment.
        :rtype: SpectralSegment
        """
        return SpectralSegment(self.a - margin * abs(self.a), self.b + margin * abs(self.b))


@dataclass(frozen=True)
class ChebCoeffSet:
    """
    Chebyshev coefficients ``c_0..c_{k-1}`` of ``x -> f_m(z(x), t)`` on a segment.

    :ivar coefficients: read-only complex array of length ``k``.
    :ivar segment: the segment the expansion lives on.
    :ivar t: evaluation time.
    :ivar m: order of f_m.
    :ivar tail: ratio of the last two coefficients to the largest one.
    """
    coefficients: np.ndarray
    segment: SpectralSegment
    t: float
    m: int
    tail: float

    @property
    def k(self) -> int:
        """Number of terms."""
        return int(self.coefficients.size)

    def __call__(self, x: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
        """Evaluates the truncated series at ``x`` in ``[-1, 1]``."""
        return np.polynomial.chebyshev.chebval(x, self.coefficients)


def check_order(m: int) -> int:
    """
    Validates the order of f_m.

    :param m: order.
    :type m: int
    :raises ValueError: if ``m`` is not a positive integer.
    :return: ``m`` as int.
    :rtype: int
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError('Error@check_order.', f'order m must be a positive integer, got {m!r}')
    return int(m)


def _taylor_branch(w: np.ndarray, t: float, m: int) -> np.ndarray:
    term = np.full(w.shape, 1.0 / math.factorial(m), dtype=complex)
    total = term.copy()
    for j in range(1, TAYLOR_MAX_TERMS):
        term = term * w / (m + j)
        total += term
        if np.all(np.abs(term) <= TAYLOR_RTOL * np.abs(total)):
            break
    return t ** m * total


def _direct_branch(w: np.ndarray, t: float, m: int) -> np.ndarray:
    partial = np.zeros(w.shape, dtype=complex)
    term = np.ones(w.shape, dtype=complex)
    for j in range(m):
        partial += term
        term = term * w / (j + 1)
    return t ** m * (np.exp(w) - partial) / w ** m


def fm_values(z: Union[complex, np.ndarray], t: float, m: int) -> np.ndarray:
    """
    Vectorised f_m(z, t).

    Small arguments (``|zt| <= m/2``) use the series ``t^m sum_j (zt)^j / (m+j)!``,
    larger ones the closed form.

    :param z: points of the complex plane.
    :type z: Union[complex, np.ndarray]
    :param t: time, ``t >= 0``.
    :type t: float
    :param m: order, ``m >= 1``.
    :type m: int
    :raises NonFinite: if ``z`` or ``t`` is not finite.
    :raises ValueError: if ``t < 0`` or ``m`` is invalid.
    :return: complex array shaped like ``z``.
    :rtype: np.ndarray
    """
    m = check_order(m)
    z = np.asarray(z, dtype=complex)
    if not (np.all(np.isfinite(z)) and math.isfinite(t)):
        raise NonFinite('Error@fm_values.', f'non-finite input (t={t})')
    if t < 0:
        raise ValueError('Error@fm_values.', f'time must be non-negative, got {t}')

    w = z * t
    result = np.empty(w.shape, dtype=complex)
    small = np.abs(w) <= SWITCH_RATIO * m
    if np.any(small):
        result[small] = _taylor_branch(w[small], t, m)
    if np.any(~small):
        result[~small] = _direct_branch(w[~small], t, m)
    return result


def fm_scalar(z: complex, t: float, m: int) -> complex:
    """
    f_m(z, t) for a single point.

    :Example:

    >>> fm_scalar(0, 2.0, 3)
    (1.3333333333333333+0j)
    """
    return complex(fm_values(np.array([z]), t, m)[0])


def _tail_ratio(coefficients: np.ndarray) -> float:
    scale = float(np.max(np.abs(coefficients)))
    if coefficients.size < 3 or scale == 0.0:
        return 0.0
    return float(max(abs(coefficients[-1]), abs(coefficients[-2])) / scale)


@lru_cache(maxsize=4096)
def _cheb_coefficients(a: float, b: float, t: float, m: int, k: int, oversampling: int) -> np.ndarray:
    count = oversampling * k
    x = np.cos(np.pi * (np.arange(count) + 0.5) / count)
    samples = fm_values(SpectralSegment(a, b).to_z(x), t, m)
    coefficients = (dct(samples.real, type=2) + 1j * dct(samples.imag, type=2)) / count
    coefficients[0] *= 0.5
    coefficients = coefficients[:k].copy()
    coefficients.setflags(write=False)
    return coefficients


def fm_cheb_coeffs(segment: SpectralSegment,
                   t: float,
                   m: int,
                   k: int,
                   oversampling: int = OVERSAMPLING,
                   tail_tol: float = TAIL_TOL) -> ChebCoeffSet:
    """
    Chebyshev coefficients of ``x -> f_m(z(x), t)`` where ``z(x)`` maps ``[-1, 1]`` onto the
    segment.

    Samples at ``oversampling * k`` Chebyshev points of the first kind and applies a
    type-II cosine transform; no operator is applied.

    :param segment: segment ``i[a, b]``.
    :type segment: SpectralSegment
    :param t: evaluation time, ``t >= 0``.
    :type t: float
    :param m: order of f_m.
    :type m: int
    :param k: number of terms, ``k >= 1``.
    :type k: int
    :param oversampling: sample points per term, at least 4; defaults to 4
    :type oversampling: int, optional
    :param tail_tol: largest accepted tail ratio, defaults to 1e-11
    :type tail_tol: float, optional
    :raises ValueError: on invalid ``k`` or ``oversampling``.
    :raises TailTooLarge: if the last two coefficients are not small against the largest.
    :return: the coefficient set.
    :rtype: ChebCoeffSet
    """
    if int(k) != k or k < 1:
        raise ValueError('Error@fm_cheb_coeffs.', f'term count k must be >= 1, got {k!r}')
    if int(oversampling) != oversampling or oversampling < 4:
        raise ValueError('Error@fm_cheb_coeffs.', f'oversampling must be >= 4, got {oversampling!r}')
    m = check_order(m)
    coefficients = _cheb_coefficients(float(segment.a), float(segment.b), float(t), m, int(k),
                                      int(oversampling))
    tail = _tail_ratio(coefficients)
    if tail > tail_tol:
        raise TailTooLarge(
            'Error@fm_cheb_coeffs.',
            f'tail ratio {tail:.2e} > {tail_tol:.1e} (m={m}, k={k}, t={t:.6g}, '
            f'segment i[{segment.a:.6g}, {segment.b:.6g}])'
        )
    return ChebCoeffSet(coefficients=coefficients, segment=segment, t=float(t), m=m, tail=tail)


def stability_weights(y: np.ndarray, dt: float, m: int, weight: float) -> np.ndarray:
    """``1 + weight * (|y| dt)^m / m!`` for points ``iy`` of the segment."""
    return 1.0 + weight * (np.abs(y) * dt) ** m / math.factorial(m)


@lru_cache(maxsize=4096)
def _fit_coefficients(a: float, b: float, t: float, m: int, k: int, dt: float, weight: float,
                      samples: int) -> np.ndarray:
    segment = SpectralSegment(a, b)
    count = samples * k
    x = np.cos(np.pi * (np.arange(count) + 0.5) / count)
    values = fm_values(segment.to_z(x), t, m)
    w = stability_weights(segment.half_width * x + segment.center, dt, m, weight)
    fit = np.polynomial.chebyshev.chebfit(x, np.column_stack([values.real, values.imag]), k - 1, w=w)
    coefficients = fit[:, 0] + 1j * fit[:, 1]
    coefficients.setflags(write=False)
    return coefficients


def fm_fit_coeffs(segment: SpectralSegment,
                  t: float,
                  m: int,
                  k: int,
                  dt: float,
                  weight: float = STABILITY_WEIGHT,
                  samples: int = FIT_SAMPLES) -> ChebCoeffSet:
    """
    Weighted least-squares Chebyshev fit of ``x -> f_m(z(x), t)`` with ``k`` terms.

    Used when ``k`` terms cannot resolve f_m. The truncated series then spreads its error
    evenly over the segment, and the one-step map ``sum_{j<m} (zt)^j / j! + z^m p(z)`` grows
    past 1 near the far end where ``|z|^m`` is largest. The weight
    ``1 + weight * (|z| dt)^m / m!`` moves the error towards small ``|z|``. It depends on the
    slab length ``dt`` only, so every offset of a slab is fitted with the same weight.

    :param segment: segment ``i[a, b]``.
    :type segment: SpectralSegment
    :param t: evaluation time, ``t >= 0``.
    :type t: float
    :param m: order of f_m.
    :type m: int
    :param k: number of terms, ``k >= 1``.
    :type k: int
    :param dt: slab length the weight is keyed to.
    :type dt: float
    :param weight: weight scale, ``0`` gives the unweighted fit; defaults to 1.5e-3
    :type weight: float, optional
    :param samples: sample points per term, defaults to 16
    :type samples: int, optional
    :raises ValueError: on invalid ``k``, ``dt``, ``weight`` or ``samples``.
    :return: the coefficient set; ``tail`` is measured on the fitted coefficients.
    :rtype: ChebCoeffSet
    """
    if int(k) != k or k < 1:
        raise ValueError('Error@fm_fit_coeffs.', f'term count k must be >= 1, got {k!r}')
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError('Error@fm_fit_coeffs.', f'slab length must be positive, got {dt!r}')
    if not weight >= 0:
        raise ValueError('Error@fm_fit_coeffs.', f'weight must be non-negative, got {weight!r}')
    if int(samples) != samples or samples < 2:
        raise ValueError('Error@fm_fit_coeffs.', f'samples must be >= 2, got {samples!r}')
    m = check_order(m)
    coefficients = _fit_coefficients(float(segment.a), float(segment.b), float(t), m, int(k), float(dt),
                                     float(weight), int(samples))
    return ChebCoeffSet(coefficients=coefficients, segment=segment, t=float(t), m=m,
                        tail=_tail_ratio(coefficients))


def minimal_term_count(segment: SpectralSegment,
                       t: float,
                       m: int,
                       tail_tol: float = TAIL_TOL,
                       k_min: int = 4,
                       k_max: int = 512,
                       oversampling: int = OVERSAMPLING) -> int:
    """
    Smallest term count (grown geometrically from ``k_min``) whose expansion passes the
    tail check.

    :raises TailTooLarge: if ``k_max`` terms are still not enough.
    :return: the term count.
    :rtype: int
    """
    k = k_min
    while k <= k_max:
        try:
            fm_cheb_coeffs(segment, t, m, k, oversampling=oversampling, tail_tol=tail_tol)
        except TailTooLarge:
            k += max(1, k // 4)
            continue
        logger.debug('minimal_term_count: k=%d for m=%d, t=%.6g', k, m, t)
        return k
    raise TailTooLarge('Error@minimal_term_count.',
                       f'no term count up to {k_max} meets tail tolerance {tail_tol:.1e}')
