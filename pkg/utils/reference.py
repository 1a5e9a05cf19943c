"""
Reference integrators: fixed-step classical Runge-Kutta 4 and the adaptive Dormand-Prince
5(4) pair with PI step-size control.

Both take a right-hand side ``rhs(t, u)`` and count its evaluations; for the model problems
one evaluation is one application of the Hamiltonian.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from utils.exceptions import StepUnderflow
from utils.operators import check_finite
from utils.reports import RunReport


logger = logging.getLogger(__name__)

Rhs = Callable[[float, np.ndarray], np.ndarray]

# Dormand-Prince 5(4): nodes, stage matrix, 5th order weights, (5th - 4th) error weights
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


@dataclass
class RK4Config:
    steps: int = 1000

    def __post_init__(self) -> None:
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError('Error@RK4Config.', f'steps must be an integer >= 1, got {self.steps!r}')


@dataclass
class RK45Config:
    """
    Tolerances and step controller constants of the adaptive integrator.

    ``initial_step`` of ``None`` selects ``0.01 * ||u0|| / ||f(0, u0)||`` in the weighted norm.
    """
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    initial_step: Optional[float] = None
    max_steps: int = 1_000_000
    safety: float = 0.9
    fac_min: float = 0.2
    fac_max: float = 10.0
    alpha: float = 0.17
    beta: float = 0.04

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError('Error@RK45Config.', f'tolerances must be positive, got {self.abs_tol!r}, {self.rel_tol!r}')
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValueError('Error@RK45Config.', f'initial step must be positive, got {self.initial_step!r}')


class _CountedRhs:
    def __init__(self, rhs: Rhs) -> None:
        self._rhs = rhs
        self.calls = 0

    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        self.calls += 1
        return self._rhs(t, u)


def rk4_propagate(rhs: Rhs, u0: np.ndarray, T: float, cfg: RK4Config) -> Tuple[np.ndarray, RunReport]:
    """
    Classical four-stage Runge-Kutta with ``cfg.steps`` equal steps; ``4 * steps`` rhs calls.

    :param rhs: right-hand side ``(t, u) -> du/dt``.
    :type rhs: Rhs
    :param u0: initial state.
    :type u0: np.ndarray
    :param T: final time.
    :type T: float
    :param cfg: step count.
    :type cfg: RK4Config
    :raises NonFinite: on blow-up.
    :return: ``u(T)`` and the run report.
    :rtype: Tuple[np.ndarray, RunReport]
    """
    started = time.perf_counter()
    f = _CountedRhs(rhs)
    h = T / cfg.steps
    u = np.asarray(u0, dtype=complex).copy()
    for n in range(cfg.steps):
        t = n * h
        k1 = f(t, u)
        k2 = f(t + 0.5 * h, u + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, u + 0.5 * h * k2)
        k4 = f(t + h, u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        check_finite(u, 'Error@rk4_propagate.', f'state at t={t + h:.6g}')
    report = RunReport(method='rk4', steps=cfg.steps, matvecs=f.calls, wall_seconds=time.perf_counter() - started)
    logger.info('rk4: %d steps, %d matvecs', cfg.steps, f.calls)
    return u, report


def _error_norm(err: np.ndarray, u: np.ndarray, u_new: np.ndarray, cfg: RK45Config) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(u), np.abs(u_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(u0: np.ndarray, f0: np.ndarray, T: float, cfg: RK45Config) -> float:
    if cfg.initial_step is not None:
        return min(cfg.initial_step, T)
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(u0)
    d0 = float(np.sqrt(np.mean(np.abs(u0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h0, T)


def rk45_propagate(rhs: Rhs, u0: np.ndarray, T: float, cfg: RK45Config) -> Tuple[np.ndarray, RunReport]:
    """
    Dormand-Prince 5(4) with first-same-as-last reuse and a PI step controller.

    Every attempt costs six rhs calls; one more is spent on ``f(0, u0)``.

    :param rhs: right-hand side ``(t, u) -> du/dt``.
    :type rhs: Rhs
    :param u0: initial state.
    :type u0: np.ndarray
    :param T: final time.
    :type T: float
    :param cfg: tolerances and controller constants.
    :type cfg: RK45Config
    :raises StepUnderflow: if the step drops to the round-off level of ``t``.
    :return: ``u(T)`` and the run report with accepted and rejected step counts.
    :rtype: Tuple[np.ndarray, RunReport]
    """
    started = time.perf_counter()
    f = _CountedRhs(rhs)
    u = np.asarray(u0, dtype=complex).copy()
    t = 0.0
    k_first = f(t, u)
    h = _initial_step(u, k_first, T, cfg)
    accepted = rejected = 0
    err_prev = 1e-4
    stages = np.empty((7, u.size), dtype=complex)

    while t < T:
        if accepted + rejected >= cfg.max_steps:
            raise StepUnderflow('Error@rk45_propagate.', f'step limit {cfg.max_steps} reached at t={t:.6g}')
        h = min(h, T - t)
        if h <= 16.0 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepUnderflow('Error@rk45_propagate.', f'step size {h:.3e} underflows at t={t:.6g}')

        stages[0] = k_first
        for i in range(1, 7):
            increment = sum(a * stages[j] for j, a in enumerate(DP_A[i]) if a != 0.0)
            stages[i] = f(t + DP_C[i] * h, u + h * increment)
        u_new = u + h * (DP_B @ stages)
        err = _error_norm(h * (DP_E @ stages), u, u_new, cfg)

        if math.isfinite(err) and err <= 1.0:
            t = T if T - t - h <= 16.0 * np.finfo(float).eps * T else t + h
            u = u_new
            k_first = stages[6].copy()
            accepted += 1
            factor = cfg.safety * max(err, 1e-10) ** (-cfg.alpha) * err_prev ** cfg.beta
            h *= min(cfg.fac_max, max(cfg.fac_min, factor))
            err_prev = max(err, 1e-4)
        else:
            rejected += 1
            factor = cfg.fac_min if not math.isfinite(err) else cfg.safety * err ** (-1.0 / 5.0)
            h *= min(1.0, max(cfg.fac_min, factor))
        logger.debug('rk45: t=%.6g h=%.3e err=%.3e', t, h, err)

    report = RunReport(method='rk45', steps=accepted, matvecs=f.calls, wall_seconds=time.perf_counter() - started,
                       accepted=accepted, rejected=rejected)
    logger.info('rk45: %d accepted, %d rejected, %d matvecs', accepted, rejected, f.calls)
    return u, report
