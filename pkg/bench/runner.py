"""
Runs single benchmark rows and sweeps: builds the model, propagates with the requested
method, compares against the reference solution and returns a RunReport.

Reference solutions of the examples without a closed form are computed once with a fine
semiglobal run, cross-checked against a second semiglobal configuration and against RK4 at
a multiple of its finest tabulated step count, and cached as ``.npy`` files keyed by the
model parameters.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import itertools
import logging
import os
import time
import traceback
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

import numpy as np

from utils.config import Config, Variables
from utils.exceptions import ConfigError, NoConvergence, PropagationError
from utils.models import AdvectionProblem, FourierModel, build_problem
from utils.reference import RK4Config, rk4_propagate, rk45_propagate
from utils.reports import RunReport
from utils.semiglobal import PropagatorConfig, propagate, solve_const_G
from utils.utils import parameters_key, relative_l2_error
from utils.workers import run_rows


logger = logging.getLogger(__name__)


@dataclass
class RunRequest:
    """
    One benchmark row as given on the command line.

    ``k`` of ``None`` selects the term count automatically; ``T``, ``eps``, ``tol``,
    ``tail_tol`` and ``min_sweeps`` of ``None`` take the model / configuration defaults.
    A fixed ``k`` that does not resolve f_m over two slab lengths needs an explicit
    ``tail_tol``.
    """
    example: str
    method: str = 'semiglobal'
    steps: Optional[int] = None
    one_shot: bool = False
    m: int = 7
    k: Optional[int] = 7
    T: Optional[float] = None
    eps: Optional[float] = None
    tol: Optional[float] = None
    tail_tol: Optional[float] = None
    min_sweeps: Optional[int] = None


class Runner:
    """
    Executes run requests against a configuration.

    :param config: run-time settings.
    :type config: Config
    :param variables: model parameters and published tables.
    :type variables: Variables
    :param cache_dir: directory of cached reference solutions, defaults to the configured one.
    :type cache_dir: Optional[str]
    """

    def __init__(self, config: Config, variables: Variables, cache_dir: Optional[str] = None) -> None:
        self._config = config
        self._variables = variables
        self._reference = config.reference_settings()
        self._cache_dir = cache_dir if cache_dir is not None else self._reference['cache_dir']
        self._references: Dict[str, np.ndarray] = {}

    @property
    def config(self) -> Config:
        return self._config

    @property
    def variables(self) -> Variables:
        return self._variables

    def validate(self, request: RunRequest) -> None:
        """
        :raises ConfigError: for unknown names or inconsistent options.
        """
        if request.example not in self._variables.examples:
            raise ConfigError('Error@Runner.validate.',
                              f'unknown example {request.example!r}, expected one of {self._variables.examples}')
        if request.method not in self._variables.methods:
            raise ConfigError('Error@Runner.validate.',
                              f'unknown method {request.method!r}, expected one of {self._variables.methods}')
        if request.one_shot:
            if request.method != 'semiglobal':
                raise ConfigError('Error@Runner.validate.', '--one-shot applies to the semiglobal method only')
            if request.example != AdvectionProblem.name:
                raise ConfigError('Error@Runner.validate.', '--one-shot needs a time-independent G (advection)')
        elif request.method != 'rk45' and (request.steps is None or request.steps < 1):
            raise ConfigError('Error@Runner.validate.', f'--steps must be a positive integer, got {request.steps!r}')
        if request.T is not None and not request.T > 0:
            raise ConfigError('Error@Runner.validate.', f'--T must be positive, got {request.T!r}')
        if request.method == 'semiglobal':
            if request.m is None or int(request.m) != request.m or request.m < 2:
                raise ConfigError('Error@Runner.validate.', f'--m must be an integer >= 2, got {request.m!r}')
            if request.k is not None and (int(request.k) != request.k or request.k < 1):
                raise ConfigError('Error@Runner.validate.', f'--k must be positive or auto, got {request.k!r}')
        if request.tail_tol is not None and not 0 < request.tail_tol <= 1:
            raise ConfigError('Error@Runner.validate.', f'--tail-tol must lie in (0, 1], got {request.tail_tol!r}')
        if request.min_sweeps is not None and request.min_sweeps < 1:
            raise ConfigError('Error@Runner.validate.', f'--min-sweeps must be positive, got {request.min_sweeps!r}')

    def build_problem(self, request: RunRequest) -> FourierModel:
        """Fresh model (own matvec counter) for the request."""
        kwargs = self._variables.example(request.example)
        if request.T is not None:
            kwargs['T'] = request.T
        if request.example == 'gpe':
            ground = self._config.ground_state_settings()
            kwargs.update(ground_state_tol=ground['tol'], dtau=ground['step'])
        try:
            return build_problem(request.example, **kwargs)
        except TypeError as e:
            raise ConfigError('Error@Runner.build_problem.', f'invalid parameters for {request.example}: {e}') from e

    def propagator_config(self, request: RunRequest, steps: Optional[int] = None) -> PropagatorConfig:
        return self._config.propagator_config(m=request.m, k=request.k, steps=steps or request.steps,
                                              eps=request.eps, tail_tol=request.tail_tol,
                                              min_first_step_iters=request.min_sweeps)

    def _finest_steps(self, example: str, method: str = 'semiglobal') -> Optional[int]:
        finest = [max(row['steps'] for row in self._variables.table(number)['rows'])
                  for number in self._variables.tables
                  if self._variables.table(number)['example'] == example
                  and self._variables.table(number)['method'] == method]
        return max(finest) if finest else None

    def reference(self, request: RunRequest) -> np.ndarray:
        """
        Final state used as the exact solution: the closed form for advection, otherwise a
        cached fine semiglobal run that agrees with an independent coarser one.

        :raises NoConvergence: if the two reference runs disagree.
        """
        problem = self.build_problem(request)
        if isinstance(problem, AdvectionProblem):
            return problem.exact(problem.T).astype(complex)
        settings = self._reference
        key = parameters_key({'model': problem.parameters,
                              **{name: settings[name] for name in ('m', 'k', 'steps_factor')}})
        if key in self._references:
            return self._references[key]
        path = os.path.join(self._cache_dir, f'{problem.name}-{key[:16]}.npy')
        if os.path.isfile(path):
            logger.debug('reference for %s loaded from %s', problem.name, path)
            self._references[key] = np.load(path)
            return self._references[key]

        finest = self._finest_steps(problem.name) or 1000
        fine_cfg = self._config.propagator_config(m=settings['m'], k=settings['k'],
                                                  steps=settings['steps_factor'] * finest)
        check_cfg = self._config.propagator_config(m=settings['check_m'], k=settings['check_k'],
                                                   steps=settings['check_steps_factor'] * finest)
        logger.info('computing %s reference: m=%d, %d steps', problem.name, fine_cfg.m, fine_cfg.steps)
        fine, _ = propagate(problem, problem.initial_state, problem.T, fine_cfg)
        check_problem = self.build_problem(request)
        check, _ = propagate(check_problem, check_problem.initial_state, check_problem.T, check_cfg)
        agreement = relative_l2_error(check.final, fine.final)
        if agreement > settings['agreement']:
            raise NoConvergence('Error@Runner.reference.',
                                f'reference runs for {problem.name} disagree by {agreement:.2e} '
                                f'(required {settings["agreement"]:.1e})')
        logger.info('%s reference agrees to %.2e', problem.name, agreement)
        self._rk4_cross_check(request, fine.final)
        os.makedirs(self._cache_dir, exist_ok=True)
        np.save(path, fine.final)
        self._references[key] = fine.final
        return fine.final

    def _rk4_cross_check(self, request: RunRequest, final: np.ndarray) -> None:
        """
        Compares a reference with RK4 at ``rk4_steps_factor`` times the finest tabulated RK4
        row. Fourth order limits that run to about ``error / factor^4`` of its finest row, so
        the agreement asked for is ``rk4_agreement``, not the semiglobal one.

        :raises NoConvergence: if RK4 disagrees by more than ``rk4_agreement``.
        """
        settings = self._reference
        finest = self._finest_steps(request.example, 'rk4')
        if finest is None or not settings['rk4_steps_factor']:
            return
        problem = self.build_problem(request)
        steps = settings['rk4_steps_factor'] * finest
        logger.info('cross-checking %s reference with rk4, %d steps', problem.name, steps)
        u_T, _ = rk4_propagate(problem.rhs, problem.initial_state, problem.T, RK4Config(steps))
        agreement = relative_l2_error(u_T, final)
        if agreement > settings['rk4_agreement']:
            raise NoConvergence('Error@Runner.reference.',
                                f'rk4 cross-check for {problem.name} disagrees by {agreement:.2e} '
                                f'(required {settings["rk4_agreement"]:.1e})')
        logger.info('%s reference agrees with rk4 to %.2e', problem.name, agreement)

    def run(self, request: RunRequest, reference: Optional[np.ndarray] = None) -> RunReport:
        """
        Executes one row. Numerical failures are reported in the ``status`` column.

        :param request: the row.
        :type request: RunRequest
        :param reference: final reference state, computed (or loaded) when omitted.
        :type reference: Optional[np.ndarray]
        :raises ConfigError: for an invalid request.
        :return: the report.
        :rtype: RunReport
        """
        self.validate(request)
        started = time.perf_counter()
        semiglobal = request.method == 'semiglobal'
        report = RunReport(method=request.method, example=request.example, steps=request.steps or 0,
                           m=request.m if semiglobal else None, k=request.k if semiglobal else None)
        problem = None
        try:
            if reference is None:
                reference = self.reference(request)
            problem = self.build_problem(request)
            u0 = problem.initial_state
            if semiglobal and request.one_shot:
                u_T, report = solve_const_G(problem.operator, u0, problem.source_at, problem.T, request.m, request.k,
                                            problem.segment,
                                            tail_tol=request.tail_tol or self._config.section('kernels')['tail_tol'],
                                            oversampling=self._config.section('propagator')['oversampling'],
                                            k_max=self._config.section('propagator')['k_max'])
            elif semiglobal:
                trajectory, report = propagate(problem, u0, problem.T, self.propagator_config(request))
                u_T = trajectory.final
            elif request.method == 'rk4':
                u_T, report = rk4_propagate(problem.rhs, u0, problem.T, RK4Config(request.steps))
            else:
                tol = {} if request.tol is None else {'rel_tol': request.tol, 'abs_tol': request.tol}
                u_T, report = rk45_propagate(problem.rhs, u0, problem.T, self._config.rk45_config(**tol))
            report = replace(report, example=request.example, rel_l2_error=relative_l2_error(u_T, reference))
        except PropagationError as e:
            logger.error(f'{type(e).__name__} occurred, args={str(e.args)}')
            logger.debug(traceback.format_exc())
            report = replace(report, matvecs=problem.counter.count if problem is not None else 0,
                             wall_seconds=time.perf_counter() - started, status=e.reason)
        return report

    def expand(self, request: RunRequest, grid: Dict[str, List[int]]) -> List[RunRequest]:
        """
        One request per combination of the swept values. When ``m`` is swept without ``k``,
        ``k`` follows ``m``.
        """
        if any(len(values) == 0 for values in grid.values()):
            return []
        steps = grid.get('steps', [request.steps])
        ms = grid.get('m', [request.m])
        ks = grid.get('k')
        requests = []
        for step_count, m in itertools.product(steps, ms):
            for k in (ks if ks is not None else [m if 'm' in grid else request.k]):
                requests.append(replace(request, steps=step_count, m=m, k=k))
        return requests

    def sweep(self, requests: List[RunRequest], threads: Optional[int] = None) -> List[RunReport]:
        """
        Runs the requests, in parallel when ``threads > 1``. Each row builds its own model;
        reference solutions are computed beforehand in the calling thread.
        """
        for request in requests:
            self.validate(request)
        tasks = []
        for request in requests:
            try:
                reference = self.reference(request)
            except PropagationError:
                # the row recomputes the reference and reports the failure
                reference = None
            tasks.append(lambda request=request, reference=reference: self.run(request, reference))
        return run_rows(tasks, threads if threads is not None else self._config.threads)
