"""
Semi-global propagator for ``u' = G(t, u) u + s(t, u)``.

Each time slab ``[t_n, t_n + dt]`` freezes ``G_n`` at the slab midpoint, moves the rest of
the right-hand side into an effective source ``s_n = s + (G - G_n) u`` sampled at the
Chebyshev-Lobatto nodes, and evaluates the exact solution of the frozen problem with a
polynomial source:

    u(tau) = sum_{j<m} tau^j / j! v_j + f_m(G_n, tau) v_m,      v_j = G_n v_{j-1} + s_{j-1}

where ``f_m(G_n, tau)`` is applied through a Chebyshev expansion over the spectral segment
of ``G_n``. The same evaluation extrapolates one slab ahead to predict the node values of
the next slab.

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
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from utils.chebyshev import TaylorSourceSet, TimeSlab, barycentric_eval, cheb_to_taylor, samples_to_cheb
from utils.exceptions import DimensionMismatch, NoConvergence
from utils.kernels import (OVERSAMPLING, STABILITY_WEIGHT, TAIL_TOL, SpectralSegment, fm_cheb_coeffs, fm_fit_coeffs,
                           minimal_term_count)
from utils.operators import MatvecCounter, OperatorHandle, ScaledOperator, check_finite
from utils.reports import RunReport


logger = logging.getLogger(__name__)

Source = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class PropagatorConfig:
    """
    Settings of a semi-global run.

    :ivar m: Chebyshev-Lobatto nodes per slab.
    :ivar k: Chebyshev terms of f_m; ``None`` picks the smallest count meeting
        ``auto_tail_tol``.
    :ivar steps: number of slabs over ``[0, T]``.
    :ivar eps: first-step convergence tolerance (unweighted L2).
    :ivar max_first_step_iters: sweep limit of the first step.
    :ivar min_first_step_iters: sweeps run before the convergence test may stop the first step.
    :ivar tail_tol: accepted tail ratio of the f_m expansions; a fixed ``k`` that does not
        resolve f_m needs an explicit, looser value.
    :ivar stability_weight: weight scale of the fit used for unresolved expansions
        (see :func:`utils.kernels.fm_fit_coeffs`); ``0`` keeps the truncated series.
    :ivar auto_tail_tol: tail ratio targeted when ``k`` is chosen automatically.
    :ivar oversampling: sample points per Chebyshev term.
    :ivar k_max: largest automatically chosen ``k``.
    """
    m: int = 7
    k: Optional[int] = 7
    steps: int = 1
    eps: float = 1e-12
    max_first_step_iters: int = 50
    min_first_step_iters: int = 1
    tail_tol: float = TAIL_TOL
    stability_weight: float = STABILITY_WEIGHT
    auto_tail_tol: float = TAIL_TOL
    oversampling: int = OVERSAMPLING
    k_max: int = 512

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise ValueError('Error@PropagatorConfig.', f'm must be an integer >= 2, got {self.m!r}')
        if self.k is not None and (int(self.k) != self.k or self.k < 1):
            raise ValueError('Error@PropagatorConfig.', f'k must be an integer >= 1, got {self.k!r}')
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError('Error@PropagatorConfig.', f'steps must be an integer >= 1, got {self.steps!r}')
        if not self.eps > 0:
            raise ValueError('Error@PropagatorConfig.', f'eps must be positive, got {self.eps!r}')
        if self.max_first_step_iters < 1:
            raise ValueError('Error@PropagatorConfig.',
                             f'max_first_step_iters must be >= 1, got {self.max_first_step_iters!r}')
        if int(self.min_first_step_iters) != self.min_first_step_iters or \
                not 1 <= self.min_first_step_iters <= self.max_first_step_iters:
            raise ValueError('Error@PropagatorConfig.',
                             f'min_first_step_iters must lie in [1, {self.max_first_step_iters}], '
                             f'got {self.min_first_step_iters!r}')
        if not (self.tail_tol > 0 and self.auto_tail_tol > 0):
            raise ValueError('Error@PropagatorConfig.', 'tail tolerances must be positive')
        if not self.stability_weight >= 0:
            raise ValueError('Error@PropagatorConfig.', f'stability_weight must be >= 0, got {self.stability_weight!r}')

    def resolve_k(self, segment: SpectralSegment, t: float) -> int:
        """``k``, or the smallest term count resolving f_m up to time ``t``."""
        if self.k is not None:
            return int(self.k)
        return minimal_term_count(segment, t, self.m, tail_tol=self.auto_tail_tol,
                                  k_max=self.k_max, oversampling=self.oversampling)


class EvolutionProblem(ABC):
    """
    ``u' = G(t, u) u + s(t, u)`` as seen by the propagators.

    Subclasses build the frozen operator ``G_n`` and may override
    :meth:`operator_difference` when ``(G(t, u) - G_n) u`` is cheaper than two counted
    applications (a diagonal potential difference, for instance).
    """

    def __init__(self, dimension: int, segment: SpectralSegment, counter: Optional[MatvecCounter] = None) -> None:
        self._dimension = int(dimension)
        self._segment = segment
        self._counter = counter if counter is not None else MatvecCounter()

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def segment(self) -> SpectralSegment:
        """Segment ``i[a, b]`` enclosing the spectrum of every ``G`` met during a run."""
        return self._segment

    @property
    def counter(self) -> MatvecCounter:
        return self._counter

    @property
    def nonlinear(self) -> bool:
        """True if ``G`` depends on the state."""
        return False

    @abstractmethod
    def frozen_operator(self, t: float, u: np.ndarray) -> OperatorHandle:
        """``G(t, u)`` as a counted handle sharing :attr:`counter`."""

    def operator_difference(self, t: float, u: np.ndarray, frozen: OperatorHandle) -> np.ndarray:
        """``(G(t, u) - G_n) u``; two counted applications unless overridden."""
        return self.frozen_operator(t, u).apply(u) - frozen.apply(u)

    def source(self, t: float, u: np.ndarray) -> np.ndarray:
        """Inhomogeneous term ``s(t, u)``, zero by default."""
        return np.zeros(self._dimension, dtype=complex)

    def rhs(self, t: float, u: np.ndarray) -> np.ndarray:
        """``G(t, u) u + s(t, u)`` with one counted application."""
        return self.frozen_operator(t, u).apply(u) + self.source(t, u)


class ConstantProblem(EvolutionProblem):
    """
    A time-independent linear operator with an optional source ``s(t)``.

    :param operator: counted handle of ``G``; the problem shares its counter.
    :type operator: OperatorHandle
    :param segment: segment enclosing the spectrum of ``G``.
    :type segment: SpectralSegment
    :param source: ``t -> s(t)``, zero when omitted.
    :type source: Optional[Callable[[float], np.ndarray]]
    """

    def __init__(self,
                 operator: OperatorHandle,
                 segment: SpectralSegment,
                 source: Optional[Callable[[float], np.ndarray]] = None) -> None:
        super().__init__(operator.dimension, segment, operator.counter)
        self._operator = operator
        self._source = source

    def frozen_operator(self, t: float, u: np.ndarray) -> OperatorHandle:
        return self._operator

    def operator_difference(self, t: float, u: np.ndarray, frozen: OperatorHandle) -> np.ndarray:
        return np.zeros(self.dimension, dtype=complex)

    def source(self, t: float, u: np.ndarray) -> np.ndarray:
        if self._source is None:
            return super().source(t, u)
        return np.asarray(self._source(t), dtype=complex)


@dataclass(frozen=True)
class RecurrenceVectors:
    """``v_0..v_m`` with ``v_0 = u0`` and ``v_j = G v_{j-1} + s_{j-1}``; shape ``(m + 1, N)``."""
    vectors: np.ndarray

    @property
    def m(self) -> int:
        return int(self.vectors.shape[0]) - 1


@dataclass
class SlabState:
    """
    Node values of a slab.

    :ivar slab: the slab.
    :ivar node_values: array ``(m, N)``; row 0 is the accepted state at ``slab.t_start``.
    :ivar prediction: extrapolated node values of the next slab, if computed.
    :ivar sweeps: fixed-point sweeps spent on this slab (first step only).
    """
    slab: TimeSlab
    node_values: np.ndarray
    prediction: Optional[np.ndarray] = None
    sweeps: int = 0


@dataclass
class Trajectory:
    """States at the step boundaries ``0, dt, ..., T`` and per-step diagnostics."""
    times: np.ndarray
    states: np.ndarray
    junction_gaps: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sweeps: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def recurrence_vectors(G: OperatorHandle, u0: np.ndarray, src: TaylorSourceSet) -> RecurrenceVectors:
    """
    Builds ``v_0..v_m``; consumes exactly ``m`` applications of ``G``.

    :raises DimensionMismatch: if ``u0`` or the source vectors do not match ``G``.
    """
    u0 = np.asarray(u0)
    if u0.shape != (G.dimension,) or src.vectors.shape[1:] != (G.dimension,):
        raise DimensionMismatch('Error@recurrence_vectors.',
                                f'G has dimension {G.dimension}, u0 {u0.shape}, source {src.vectors.shape}')
    vectors = np.empty((src.m + 1, G.dimension), dtype=complex)
    vectors[0] = u0
    for j in range(1, src.m + 1):
        vectors[j] = G.apply(vectors[j - 1]) + src.vectors[j - 1]
    return RecurrenceVectors(vectors)


def taylor_weights(times: Sequence[float], m: int) -> np.ndarray:
    """Matrix of ``tau_i^j / j!``, shape ``(len(times), m)``."""
    times = np.asarray(times, dtype=float)
    factorials = np.array([math.factorial(j) for j in range(m)], dtype=float)
    return times[:, None] ** np.arange(m) / factorials


def fm_coefficient_matrix(segment: SpectralSegment,
                          times: Sequence[float],
                          m: int,
                          k: int,
                          tail_tol: float = TAIL_TOL,
                          oversampling: int = OVERSAMPLING,
                          dt: Optional[float] = None,
                          stability_weight: float = 0.0) -> np.ndarray:
    """
    Chebyshev coefficients of ``f_m(., tau_i)``, one row per offset; shape ``(len(times), k)``.

    Every expansion must pass ``tail_tol``. With a slab length ``dt`` and a positive
    ``stability_weight``, offsets whose truncated series is unresolved (tail above
    :data:`utils.kernels.TAIL_TOL`) take the weighted fit instead.
    """
    rows = []
    for tau in times:
        expansion = fm_cheb_coeffs(segment, float(tau), m, k, oversampling=oversampling, tail_tol=tail_tol)
        if dt is not None and stability_weight > 0 and expansion.tail > TAIL_TOL:
            expansion = fm_fit_coeffs(segment, float(tau), m, k, dt, weight=stability_weight)
        rows.append(expansion.coefficients)
    return np.array(rows)


def evaluate_solution(G: OperatorHandle,
                      rec: RecurrenceVectors,
                      segment: SpectralSegment,
                      times: Sequence[float],
                      k: int,
                      tail_tol: float = TAIL_TOL,
                      oversampling: int = OVERSAMPLING,
                      coefficients: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Solution of the frozen problem at the local offsets ``times``:

        u(tau) = sum_{j<m} tau^j / j! v_j + sum_{n<k} c_n(tau) T_n(X) v_m

    The Chebyshev vectors ``T_n(X) v_m`` are produced once by the three-term recurrence,
    so the call costs ``k - 1`` applications of ``G`` whatever the number of offsets.

    :param G: frozen operator.
    :type G: OperatorHandle
    :param rec: recurrence vectors ``v_0..v_m``.
    :type rec: RecurrenceVectors
    :param segment: segment enclosing the spectrum of ``G``.
    :type segment: SpectralSegment
    :param times: non-negative local offsets.
    :type times: Sequence[float]
    :param k: Chebyshev term count.
    :type k: int
    :param tail_tol: accepted tail ratio, defaults to 1e-11
    :type tail_tol: float, optional
    :param oversampling: sample points per term, defaults to 4
    :type oversampling: int, optional
    :param coefficients: precomputed :func:`fm_coefficient_matrix` for ``times``.
    :type coefficients: Optional[np.ndarray]
    :raises TailTooLarge: if an expansion is not resolved by ``k`` terms.
    :return: array ``(len(times), N)``.
    :rtype: np.ndarray
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError('Error@evaluate_solution.', 'offsets must be non-negative')
    m = rec.m
    if coefficients is None:
        coefficients = fm_coefficient_matrix(segment, times, m, k, tail_tol=tail_tol, oversampling=oversampling)

    result = taylor_weights(times, m) @ rec.vectors[:m]
    X = ScaledOperator(G, segment)
    w_prev = rec.vectors[m]
    result += np.outer(coefficients[:, 0], w_prev)
    if k > 1:
        w_curr = X.apply(w_prev)
        result += np.outer(coefficients[:, 1], w_curr)
        for n in range(2, k):
            w_prev, w_curr = w_curr, 2.0 * X.apply(w_curr) - w_prev
            result += np.outer(coefficients[:, n], w_curr)
    return result


def effective_source(t: float,
                     u: np.ndarray,
                     frozen: OperatorHandle,
                     operator_at: Optional[Callable[[float, np.ndarray], OperatorHandle]] = None,
                     source: Optional[Source] = None,
                     difference: Optional[Callable[[float, np.ndarray, OperatorHandle], np.ndarray]] = None
                     ) -> np.ndarray:
    """
    ``s_n(t) = s(t, u) + (G(t, u) - G_n) u``.

    The operator part comes from ``difference`` when given (free for diagonal
    differences), otherwise from two counted applications of ``operator_at(t, u)`` and
    ``G_n``; without either the operator is taken as constant.
    """
    result = np.zeros(frozen.dimension, dtype=complex) if source is None else np.asarray(source(t, u), dtype=complex)
    if difference is not None:
        result = result + difference(t, u, frozen)
    elif operator_at is not None:
        result = result + operator_at(t, u).apply(u) - frozen.apply(u)
    return result


def _freeze(problem: EvolutionProblem, slab: TimeSlab, node_values: np.ndarray) -> OperatorHandle:
    midpoint = None
    if problem.nonlinear:
        midpoint = barycentric_eval(slab, node_values, slab.midpoint)
    return problem.frozen_operator(slab.midpoint, midpoint)


def _slab_pass(problem: EvolutionProblem,
               slab: TimeSlab,
               node_values: np.ndarray,
               times: np.ndarray,
               k: int,
               coefficients: np.ndarray) -> np.ndarray:
    """One corrector pass over a slab: ``m + k - 1`` applications of ``G``."""
    frozen = _freeze(problem, slab, node_values)
    nodes = slab.nodes
    samples = np.array([
        effective_source(nodes[j], node_values[j], frozen, source=problem.source,
                         difference=problem.operator_difference)
        for j in range(slab.m)
    ])
    src = cheb_to_taylor(samples_to_cheb(samples), slab.dt)
    rec = recurrence_vectors(frozen, node_values[0], src)
    values = evaluate_solution(frozen, rec, problem.segment, times, k, coefficients=coefficients)
    return check_finite(values, 'Error@propagate.', f'solution of the slab starting at t={slab.t_start:.6g}')


def _check_state(problem: EvolutionProblem, u0: np.ndarray) -> np.ndarray:
    u0 = np.asarray(u0, dtype=complex)
    if u0.shape != (problem.dimension,):
        raise DimensionMismatch('Error@propagate.',
                                f'initial state has shape {u0.shape}, problem dimension is {problem.dimension}')
    return check_finite(u0, 'Error@propagate.', 'initial state')


class _SlabOffsets:
    """Offsets and f_m coefficient tables shared by every slab of a run."""

    def __init__(self, problem: EvolutionProblem, cfg: PropagatorConfig, dt: float) -> None:
        self.slab0 = TimeSlab(0.0, dt, cfg.m)
        self.k = cfg.resolve_k(problem.segment, 2.0 * dt)
        tau = self.slab0.offsets
        # first step: own nodes, then the next slab's nodes except the shared endpoint
        self.first = np.concatenate([tau, dt + tau[1:]])
        self.main = dt + tau
        self.first_coefficients = fm_coefficient_matrix(problem.segment, self.first, cfg.m, self.k,
                                                        tail_tol=cfg.tail_tol, oversampling=cfg.oversampling,
                                                        dt=dt, stability_weight=cfg.stability_weight)
        self.main_coefficients = self.first_coefficients[cfg.m - 1:]


def _first_step(problem: EvolutionProblem,
                u0: np.ndarray,
                cfg: PropagatorConfig,
                offsets: _SlabOffsets) -> SlabState:
    m = cfg.m
    slab = offsets.slab0
    node_values = np.tile(u0, (m, 1))
    for sweep in range(1, cfg.max_first_step_iters + 1):
        values = _slab_pass(problem, slab, node_values, offsets.first, offsets.k, offsets.first_coefficients)
        updated = values[:m]
        updated[0] = u0
        residual = float(np.linalg.norm(updated[-1] - node_values[-1]))
        logger.debug('first step sweep %d: residual %.3e', sweep, residual)
        node_values = updated
        if sweep >= cfg.min_first_step_iters and residual <= cfg.eps:
            return SlabState(slab, node_values, prediction=values[m - 1:], sweeps=sweep)
    raise NoConvergence('Error@first_step.',
                        f'no convergence to eps={cfg.eps:.1e} after {cfg.max_first_step_iters} sweeps '
                        f'(last residual {residual:.3e})')


def first_step(problem: EvolutionProblem, u0: np.ndarray, cfg: PropagatorConfig, dt: Optional[float] = None) -> SlabState:
    """
    Fixed-point iteration on the first slab ``[0, dt]``, starting from ``u0`` at every node.

    Each sweep rebuilds the effective source from the current node values and re-evaluates
    them, costing ``m + k - 1`` applications of ``G``. Every sweep also extrapolates to the
    nodes of the second slab, so the last sweep doubles as the first main step. The
    iteration stops at the first sweep, not before ``cfg.min_first_step_iters``, whose change
    of the last node value is at most ``cfg.eps``.

    :param problem: the evolution problem.
    :type problem: EvolutionProblem
    :param u0: initial state.
    :type u0: np.ndarray
    :param cfg: propagator settings.
    :type cfg: PropagatorConfig
    :param dt: slab length, ``T / cfg.steps`` of the caller; defaults to 1.
    :type dt: Optional[float]
    :raises NoConvergence: after ``cfg.max_first_step_iters`` sweeps.
    :return: converged node values with the prediction for the next slab.
    :rtype: SlabState
    """
    u0 = _check_state(problem, u0)
    return _first_step(problem, u0, cfg, _SlabOffsets(problem, cfg, 1.0 if dt is None else float(dt)))


def propagate(problem: EvolutionProblem,
              u0: np.ndarray,
              T: float,
              cfg: PropagatorConfig) -> Tuple[Trajectory, RunReport]:
    """
    Propagates ``u0`` over ``[0, T]`` in ``cfg.steps`` slabs.

    After the first step every slab costs ``m + k - 1`` applications of ``G``: the frozen
    ``G_n`` is taken at the slab midpoint, the effective source is sampled on the predicted
    node values, and a single evaluation at the offsets ``dt + tau_j`` yields the accepted
    endpoint value (corrector) and the next slab's predicted nodes.

    :param problem: the evolution problem.
    :type problem: EvolutionProblem
    :param u0: initial state.
    :type u0: np.ndarray
    :param T: final time.
    :type T: float
    :param cfg: propagator settings.
    :type cfg: PropagatorConfig
    :raises NoConvergence: from the first step.
    :raises TailTooLarge: if a tail ratio of f_m over two slab lengths exceeds ``cfg.tail_tol``.
    :raises NonFinite: if a state leaves the finite range.
    :return: the trajectory at the step boundaries and the run report.
    :rtype: Tuple[Trajectory, RunReport]
    """
    if not (math.isfinite(T) and T > 0):
        raise ValueError('Error@propagate.', f'final time must be positive, got {T!r}')
    u0 = _check_state(problem, u0)
    started = time.perf_counter()
    matvecs_before = problem.counter.count
    dt = T / cfg.steps
    offsets = _SlabOffsets(problem, cfg, dt)

    state = _first_step(problem, u0, cfg, offsets)
    states: List[np.ndarray] = [u0, state.prediction[0]]
    gaps: List[float] = [0.0]
    predicted = state.prediction
    slab = state.slab
    for _ in range(1, cfg.steps):
        slab = slab.next()
        values = _slab_pass(problem, slab, predicted, offsets.main, offsets.k, offsets.main_coefficients)
        gaps.append(float(np.linalg.norm(predicted[-1] - values[0])))
        states.append(values[0])
        predicted = values

    trajectory = Trajectory(times=dt * np.arange(cfg.steps + 1), states=np.array(states),
                            junction_gaps=np.array(gaps), sweeps=state.sweeps)
    report = RunReport(method='semiglobal', steps=cfg.steps, m=cfg.m, k=offsets.k,
                       matvecs=problem.counter.count - matvecs_before,
                       wall_seconds=time.perf_counter() - started,
                       sweeps=state.sweeps, junction_gap=float(np.max(gaps)))
    logger.info('semiglobal: %d steps, m=%d, k=%d, %d sweeps, %d matvecs', cfg.steps, cfg.m, offsets.k,
                state.sweeps, report.matvecs)
    return trajectory, report


def solve_const_G(G: OperatorHandle,
                  u0: np.ndarray,
                  s_sampler: Optional[Callable[[float], np.ndarray]],
                  T: float,
                  m: int,
                  k: Optional[int],
                  segment: SpectralSegment,
                  tail_tol: float = TAIL_TOL,
                  oversampling: int = OVERSAMPLING,
                  k_max: int = 512) -> Tuple[np.ndarray, RunReport]:
    """
    One-shot solution of ``u' = G u + s(t)`` on a single slab ``[0, T]`` for constant ``G``:
    the source is sampled at the ``m`` nodes, so the cost is ``m + k - 1`` applications.

    :param G: counted handle of ``G``.
    :type G: OperatorHandle
    :param u0: initial state.
    :type u0: np.ndarray
    :param s_sampler: ``t -> s(t)``; ``None`` for the homogeneous problem.
    :type s_sampler: Optional[Callable[[float], np.ndarray]]
    :param T: final time.
    :type T: float
    :param m: node count.
    :type m: int
    :param k: Chebyshev term count; ``None`` picks the smallest resolving one.
    :type k: Optional[int]
    :param segment: segment enclosing the spectrum of ``G``.
    :type segment: SpectralSegment
    :raises TailTooLarge: if ``k`` terms cannot resolve f_m on the segment over ``T``.
    :return: ``u(T)`` and the run report.
    :rtype: Tuple[np.ndarray, RunReport]
    """
    started = time.perf_counter()
    matvecs_before = G.matvecs
    slab = TimeSlab(0.0, float(T), m)
    if k is None:
        k = minimal_term_count(segment, T, m, tail_tol=tail_tol, k_max=k_max, oversampling=oversampling)
    u0 = np.asarray(u0, dtype=complex)
    if s_sampler is None:
        samples = np.zeros((m, G.dimension), dtype=complex)
    else:
        samples = np.array([np.asarray(s_sampler(t), dtype=complex) for t in slab.nodes])
    src = cheb_to_taylor(samples_to_cheb(samples), slab.dt)
    rec = recurrence_vectors(G, u0, src)
    u_T = evaluate_solution(G, rec, segment, [slab.dt], k, tail_tol=tail_tol, oversampling=oversampling)[0]
    check_finite(u_T, 'Error@solve_const_G.')
    report = RunReport(method='semiglobal', steps=1, m=m, k=k, matvecs=G.matvecs - matvecs_before,
                       wall_seconds=time.perf_counter() - started)
    return u_T, report
