"""
Model problems on periodic Fourier pseudospectral grids.

* advection: ``u_t = u_x + s(x, t)`` on ``[0, 2 pi)`` with a manufactured source and the
  exact solution ``u = sin(t) sin(6x) + sin(2t) cos(10x)``;
* oscillator: the harmonic oscillator driven by ``r sin^2(pi t / T) cos(t)``;
* gpe: the one dimensional Gross-Pitaevskii equation in a harmonic trap, started from its
  boosted ground state.

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
from typing import Dict, Optional

import numpy as np
from scipy import fft
from scipy.sparse.linalg import LinearOperator
from scipy.special import ive

from utils.exceptions import DimensionMismatch, NoConvergence
from utils.operators import (MatvecCounter, OperatorHandle, SpectralDescriptor, fourier_spectral_bounds,
                             hamiltonian_bounds)
from utils.semiglobal import EvolutionProblem


logger = logging.getLogger(__name__)

# envelope period of the oscillator drive, independent of the final time
FIELD_PERIOD: float = 15.0
GPE_R_MAX: float = 8.0 * math.sqrt(math.pi)
GPE_BOOST: float = 8.0


class FourierGrid:
    """
    Uniform periodic grid ``x_j = x_min + j dx`` on ``[x_min, x_max)``.

    :param n: number of points, a power of two.
    :type n: int
    :param x_min: left end.
    :type x_min: float
    :param x_max: right end (excluded).
    :type x_max: float
    """

    def __init__(self, n: int, x_min: float, x_max: float) -> None:
        if n < 2 or n & (n - 1):
            raise ValueError('Error@FourierGrid.__init__.', f'n must be a power of two, got {n}')
        if not x_max > x_min:
            raise ValueError('Error@FourierGrid.__init__.', f'empty domain [{x_min}, {x_max})')
        self._n = int(n)
        self._x_min = float(x_min)
        self._x_max = float(x_max)
        self._points = np.linspace(x_min, x_max, n, endpoint=False)
        self._wavenumbers = 2.0 * np.pi * fft.fftfreq(n, d=self.spacing)

    def __repr__(self) -> str:
        return f'FourierGrid(n={self._n}, [{self._x_min:.6g}, {self._x_max:.6g}))'

    @property
    def n(self) -> int:
        return self._n

    @property
    def length(self) -> float:
        return self._x_max - self._x_min

    @property
    def spacing(self) -> float:
        return self.length / self._n

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers in the transform ordering."""
        return self._wavenumbers

    @property
    def k_max(self) -> float:
        return math.pi / self.spacing

    def norm(self, u: np.ndarray) -> float:
        """Grid-weighted L2 norm ``sqrt(dx sum |u|^2)``."""
        return float(math.sqrt(self.spacing) * np.linalg.norm(u))

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(self.spacing * np.vdot(u, v))

    def normalize(self, u: np.ndarray) -> np.ndarray:
        return u / self.norm(u)


def fourier_derivative(grid: FourierGrid, u: np.ndarray, order: int = 1) -> np.ndarray:
    """
    Spectral derivative of a periodic grid function.

    The Nyquist mode is dropped for ``order=1`` and kept as ``-k^2`` for ``order=2``.
    Real input gives real output.

    :param grid: the grid.
    :type grid: FourierGrid
    :param u: values on the grid.
    :type u: np.ndarray
    :param order: 1 or 2, defaults to 1
    :type order: int, optional
    :return: the derivative.
    :rtype: np.ndarray
    """
    u = np.asarray(u)
    if u.shape != (grid.n,):
        raise DimensionMismatch('Error@fourier_derivative.', f'expected {grid.n} values, got shape {u.shape}')
    k = grid.wavenumbers
    if order == 1:
        multiplier = 1j * k
        multiplier[grid.n // 2] = 0.0
    elif order == 2:
        multiplier = -k ** 2
    else:
        raise ValueError('Error@fourier_derivative.', f'order must be 1 or 2, got {order}')
    result = fft.ifft(multiplier * fft.fft(u))
    return result.real if np.isrealobj(u) else result


class FourierModel(EvolutionProblem):
    """Common part of the grid models: grid, final time and descriptor of the spectrum."""

    name: str = ''

    def __init__(self, grid: FourierGrid, T: float, descriptor: SpectralDescriptor,
                 counter: Optional[MatvecCounter] = None) -> None:
        super().__init__(grid.n, fourier_spectral_bounds(descriptor), counter)
        self._grid = grid
        self._T = float(T)
        self._descriptor = descriptor

    @property
    def grid(self) -> FourierGrid:
        return self._grid

    @property
    def T(self) -> float:
        return self._T

    @property
    def descriptor(self) -> SpectralDescriptor:
        return self._descriptor

    @property
    def initial_state(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def parameters(self) -> Dict:
        """Everything that determines the model; used as the reference cache key."""
        return {'name': self.name, 'n': self._grid.n, 'x_min': float(self._grid.points[0]),
                'length': self._grid.length, 'T': self._T}

    def _handle(self, matvec, context=None) -> OperatorHandle:
        operator = LinearOperator((self.dimension, self.dimension), matvec=matvec, dtype=complex)
        return OperatorHandle(operator, counter=self.counter, context=context)

    def kinetic(self, v: np.ndarray) -> np.ndarray:
        """``-1/2 d^2 v / dx^2``."""
        return -0.5 * fourier_derivative(self._grid, v, 2)


class AdvectionProblem(FourierModel):
    """``u_t = u_x + s(x, t)``, ``G = d/dx``; the source is chosen so that the exact solution is known."""

    name = 'advection'

    def __init__(self, n: int = 32, T: float = 5.0, counter: Optional[MatvecCounter] = None) -> None:
        if n < 32:
            raise ValueError('Error@AdvectionProblem.__init__.', f'n must be at least 32 to resolve mode 10, got {n}')
        grid = FourierGrid(n, 0.0, 2.0 * np.pi)
        super().__init__(grid, T, SpectralDescriptor(n, grid.length, 1), counter)
        self._operator = self._handle(lambda v: fourier_derivative(self.grid, np.ravel(v), 1))

    @property
    def operator(self) -> OperatorHandle:
        return self._operator

    @property
    def initial_state(self) -> np.ndarray:
        return self.exact(0.0).astype(complex)

    def frozen_operator(self, t: float, u: np.ndarray) -> OperatorHandle:
        return self._operator

    def operator_difference(self, t: float, u: np.ndarray, frozen: OperatorHandle) -> np.ndarray:
        return np.zeros(self.dimension, dtype=complex)

    def source(self, t: float, u: np.ndarray = None) -> np.ndarray:
        return self.source_at(t).astype(complex)

    def source_at(self, t: float, x: Optional[np.ndarray] = None) -> np.ndarray:
        """``s(x, t) = u_t - u_x`` for the exact solution."""
        x = self.grid.points if x is None else np.asarray(x)
        return (np.sin(6 * x) * np.cos(t) + 2 * np.cos(10 * x) * np.cos(2 * t)
                - 6 * np.cos(6 * x) * np.sin(t) + 10 * np.sin(10 * x) * np.sin(2 * t))

    def exact(self, t: float, x: Optional[np.ndarray] = None) -> np.ndarray:
        x = self.grid.points if x is None else np.asarray(x)
        return np.sin(t) * np.sin(6 * x) + np.sin(2 * t) * np.cos(10 * x)


class OscillatorProblem(FourierModel):
    """
    ``i psi_t = H(t) psi``, ``H(t) = -1/2 d^2/dr^2 + r^2/2 + r sin^2(pi t / 15) cos(t)``,
    ``psi(r, 0) = exp(-r^2)``. The envelope period is :data:`FIELD_PERIOD` whatever the final
    time ``T``, so a shorter run follows the same field.
    """

    name = 'oscillator'

    def __init__(self, n: int = 128, r_max: float = 10.0, T: float = 15.0,
                 counter: Optional[MatvecCounter] = None) -> None:
        grid = FourierGrid(n, -r_max, r_max)
        r = grid.points
        self._r_max = float(r_max)
        # |r F(t)| <= |r| bounds the driving term
        v_min = float(np.min(0.5 * r ** 2 - np.abs(r)))
        v_max = 0.5 * r_max ** 2 + r_max
        super().__init__(grid, T, SpectralDescriptor(n, grid.length, 2, v_min, v_max), counter)
        self._trap = 0.5 * r ** 2

    @property
    def parameters(self) -> Dict:
        return dict(super().parameters, r_max=self._r_max)

    @property
    def initial_state(self) -> np.ndarray:
        return np.exp(-self.grid.points ** 2).astype(complex)

    def field(self, t: float) -> float:
        return math.sin(math.pi * t / FIELD_PERIOD) ** 2 * math.cos(t)

    def hamiltonian(self, t: float, v: np.ndarray) -> np.ndarray:
        """``H(t) v`` (uncounted)."""
        return self.kinetic(v) + (self._trap + self.grid.points * self.field(t)) * v

    def frozen_operator(self, t: float, u: np.ndarray) -> OperatorHandle:
        return self._handle(lambda v: -1j * self.hamiltonian(t, np.ravel(v)), context=t)

    def operator_difference(self, t: float, u: np.ndarray, frozen: OperatorHandle) -> np.ndarray:
        return -1j * self.grid.points * (self.field(t) - self.field(frozen.context)) * u


@dataclass
class GroundState:
    """Result of the imaginary-time iteration."""
    state: np.ndarray
    mu: float
    residual: float
    iterations: int


def _bessel_coefficients(beta: float, max_terms: int = 400) -> np.ndarray:
    """Chebyshev coefficients of ``exp(-beta x)`` on ``[-1, 1]`` up to the factor ``exp(beta)``."""
    n = np.arange(max_terms)
    coefficients = (2.0 - (n == 0)) * (-1.0) ** n * ive(n, beta)
    significant = np.nonzero(np.abs(coefficients) > 1e-17 * abs(coefficients[0]))[0]
    return coefficients[:max(significant[-1] + 1, 2)]


def _gpe_hamiltonian(grid: FourierGrid, interaction: float, density: np.ndarray, v: np.ndarray) -> np.ndarray:
    return -0.5 * fourier_derivative(grid, v, 2) + (0.5 * grid.points ** 2 + interaction * density) * v


def ground_state(grid: FourierGrid,
                 interaction: float = 1.0,
                 tol: float = 1e-11,
                 dtau: float = 0.1,
                 max_iters: int = 20000) -> GroundState:
    """
    Ground state of ``H(v) = -1/2 d^2/dr^2 + r^2/2 + g |v|^2`` by imaginary-time iteration
    ``v <- exp(-dtau H(v)) v / ||exp(-dtau H(v)) v||``.

    The exponential is a Chebyshev series with modified Bessel coefficients over an interval
    enclosing the spectrum of ``H(v)``, so each step is exact in ``dtau``. The iteration stops
    when ``||H(v) v - mu v|| / ||v|| < tol``, ``mu = <v, H(v) v>``.

    :param grid: the grid.
    :type grid: FourierGrid
    :param interaction: nonlinear coupling ``g``, defaults to 1
    :type interaction: float, optional
    :param tol: residual tolerance, defaults to 1e-11
    :type tol: float, optional
    :param dtau: imaginary time step, defaults to 0.1
    :type dtau: float, optional
    :param max_iters: iteration limit, defaults to 20000
    :type max_iters: int, optional
    :raises NoConvergence: if the residual stays above ``tol``.
    :return: unit norm, real, nonnegative ground state with its chemical potential.
    :rtype: GroundState
    """
    if not tol > 0:
        raise ValueError('Error@ground_state.', f'tol must be positive, got {tol!r}')
    r = grid.points
    v = grid.normalize(np.exp(-0.5 * r ** 2))
    residual = math.inf
    for iteration in range(1, max_iters + 1):
        density = np.abs(v) ** 2
        hv = _gpe_hamiltonian(grid, interaction, density, v)
        mu = grid.inner(v, hv).real
        residual = float(np.linalg.norm(hv - mu * v) / np.linalg.norm(v))
        if residual < tol:
            state = np.abs(v)
            logger.debug('ground state: mu=%.12f after %d iterations', mu, iteration - 1)
            return GroundState(state=state, mu=mu, residual=residual, iterations=iteration - 1)

        descriptor = SpectralDescriptor(grid.n, grid.length, 2, 0.0,
                                        0.5 * float(np.max(r ** 2)) + interaction * float(np.max(density)))
        e_min, e_max = hamiltonian_bounds(descriptor)
        e_max *= 1.05
        center, radius = 0.5 * (e_max + e_min), 0.5 * (e_max - e_min)

        def scaled(w: np.ndarray) -> np.ndarray:
            return (_gpe_hamiltonian(grid, interaction, density, w) - center * w) / radius

        coefficients = _bessel_coefficients(dtau * radius)
        w_prev, w_curr = v, scaled(v)
        result = coefficients[0] * w_prev + coefficients[1] * w_curr
        for c in coefficients[2:]:
            w_prev, w_curr = w_curr, 2.0 * scaled(w_curr) - w_prev
            result += c * w_curr
        v = grid.normalize(result)
    raise NoConvergence('Error@ground_state.',
                        f'residual {residual:.3e} above {tol:.1e} after {max_iters} iterations')


@lru_cache(maxsize=8)
def _cached_ground_state(n: int, r_max: float, interaction: float, tol: float, dtau: float,
                         max_iters: int) -> np.ndarray:
    state = ground_state(FourierGrid(n, -r_max, r_max), interaction, tol, dtau, max_iters).state
    state.setflags(write=False)
    return state


def gpe_ground_state(grid: FourierGrid, tol: float = 1e-11, interaction: float = 1.0, dtau: float = 0.1,
                     max_iters: int = 20000) -> np.ndarray:
    """Unit norm ground state ``v_0`` of the trapped GPE on a symmetric grid."""
    if not math.isclose(grid.points[0], -0.5 * grid.length):
        return ground_state(grid, interaction, tol, dtau, max_iters).state
    return _cached_ground_state(grid.n, 0.5 * grid.length, float(interaction), float(tol), float(dtau),
                                int(max_iters)).copy()


class GPEProblem(FourierModel):
    """
    ``i psi_t = H(psi) psi``, ``H(psi) = -1/2 d^2/dr^2 + r^2/2 + g |psi|^2``,
    ``psi(r, 0) = exp(8 i r) v_0`` with ``v_0`` the ground state.

    ``G_n`` freezes the density at the slab midpoint; the difference to the current density
    is a diagonal potential and costs no matvec.
    """

    name = 'gpe'

    def __init__(self,
                 n: int = 128,
                 r_max: float = GPE_R_MAX,
                 T: float = 10.0,
                 interaction: float = 1.0,
                 ground_state_tol: float = 1e-11,
                 dtau: float = 0.1,
                 counter: Optional[MatvecCounter] = None) -> None:
        grid = FourierGrid(n, -r_max, r_max)
        self._r_max = float(r_max)
        self._interaction = float(interaction)
        self._ground_state_tol = float(ground_state_tol)
        self._ground = gpe_ground_state(grid, ground_state_tol, interaction, dtau)
        self._psi0 = np.exp(1j * GPE_BOOST * grid.points) * self._ground
        v_max = 0.5 * r_max ** 2 + self._interaction * float(np.max(np.abs(self._psi0) ** 2))
        super().__init__(grid, T, SpectralDescriptor(n, grid.length, 2, 0.0, v_max), counter)
        self._trap = 0.5 * grid.points ** 2

    @property
    def nonlinear(self) -> bool:
        return True

    @property
    def parameters(self) -> Dict:
        return dict(super().parameters, r_max=self._r_max, interaction=self._interaction,
                    ground_state_tol=self._ground_state_tol)

    @property
    def ground(self) -> np.ndarray:
        return self._ground

    @property
    def initial_state(self) -> np.ndarray:
        return self._psi0.copy()

    def hamiltonian(self, density: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``H v`` for the given density (uncounted)."""
        return self.kinetic(v) + (self._trap + self._interaction * density) * v

    def frozen_operator(self, t: float, u: np.ndarray) -> OperatorHandle:
        density = np.abs(u) ** 2
        return self._handle(lambda v: -1j * self.hamiltonian(density, np.ravel(v)), context=density)

    def operator_difference(self, t: float, u: np.ndarray, frozen: OperatorHandle) -> np.ndarray:
        return -1j * self._interaction * (np.abs(u) ** 2 - frozen.context) * u


MODELS = {
    AdvectionProblem.name: AdvectionProblem,
    OscillatorProblem.name: OscillatorProblem,
    GPEProblem.name: GPEProblem,
}


def advection_problem(**kwargs) -> AdvectionProblem:
    return AdvectionProblem(**kwargs)


def oscillator_problem(**kwargs) -> OscillatorProblem:
    return OscillatorProblem(**kwargs)


def gpe_problem(**kwargs) -> GPEProblem:
    return GPEProblem(**kwargs)


def build_problem(name: str, **kwargs) -> FourierModel:
    """
    Builds a model by name with a fresh matvec counter.

    :raises ValueError: for an unknown name.
    """
    if name not in MODELS:
        raise ValueError('Error@build_problem.', f'unknown example {name!r}, expected one of {sorted(MODELS)}')
    return MODELS[name](**kwargs)
