"""
Command-line front end of the propagator benchmarks.

Usage:
    1. Install dependencies from `requirements.txt`
    2. Run a single row, a sweep or a published table, e.g.

        python main.py --example oscillator --method semiglobal --steps 400 --m 7 --k 7 --tail-tol 1
        python main.py --example gpe --method rk4 --sweep 'steps=660,1320' --format table
        python main.py --table 2 --threads 3
        python main.py --example advection --one-shot --m 14 --k 14 --T 1 --tail-tol 1e-4

Exit codes: 0 success, 2 configuration error (any invalid value), 3 numerical failure in any row.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import argparse
import logging
import os
import sys
import traceback
from typing import List, Optional

from bench.runner import RunRequest, Runner
from bench.tables import comparison, table_requests
from utils.config import Config, Variables
from utils.exceptions import ConfigError
from utils.reports import ReportTable
from utils.utils import isNumerical, parse_sweep


logger = logging.getLogger('main')

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 2, 3


def term_count(value: str) -> Optional[int]:
    """``auto`` or a positive integer"""
    if value == 'auto':
        return None
    if not isNumerical(value) or float(value) != int(float(value)) or int(float(value)) < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {value!r}")
    return int(float(value))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Semi-global propagator benchmarks')
    parser.add_argument('--example', choices=['advection', 'oscillator', 'gpe'])
    parser.add_argument('--method', choices=['semiglobal', 'rk4', 'rk45'], default='semiglobal')
    steps = parser.add_mutually_exclusive_group()
    steps.add_argument('--steps', type=int)
    steps.add_argument('--one-shot', action='store_true', help='single slab over [0, T] (constant G only)')
    parser.add_argument('--m', type=int, default=7, help='Chebyshev time points per step')
    parser.add_argument('--k', type=term_count, default=7, help="Chebyshev terms of f_m, or 'auto'")
    parser.add_argument('--T', type=float, help='final time (model default when omitted)')
    parser.add_argument('--eps', type=float, help='first step tolerance (default 1e-12)')
    parser.add_argument('--tol', type=float, help='rk45 tolerance')
    parser.add_argument('--tail-tol', type=float, dest='tail_tol',
                        help='accepted Chebyshev tail ratio (default 1e-11); a fixed k that does not resolve f_m '
                             'needs a looser value')
    parser.add_argument('--min-sweeps', type=int, dest='min_sweeps',
                        help='first step sweeps before the convergence test')
    parser.add_argument('--out', help='output file (stdout when omitted)')
    parser.add_argument('--format', choices=['csv', 'json', 'table'], default='csv')
    parser.add_argument('--sweep', help="swept values, e.g. 'steps=350,400,600'")
    parser.add_argument('--table', type=int, help='reproduce a published table')
    parser.add_argument('--threads', type=int, help='parallel sweep rows')
    parser.add_argument('--config', default=os.path.join(BASE_DIR, 'config.yml'))
    parser.add_argument('--variables', default=os.path.join(BASE_DIR, 'variables.yml'))
    return parser


def setup_logging(config: Config) -> None:
    settings = config.logging_settings()
    logging.basicConfig(level=getattr(logging, str(settings['level']).upper(), logging.INFO),
                        format=settings['format'], stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs the command line.

    :param argv: arguments without the program name, defaults to ``sys.argv[1:]``
    :type argv: Optional[List[str]]
    :return: exit code
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    try:
        config = Config(args.config)
        variables = Variables(args.variables)
        setup_logging(config)
        runner = Runner(config, variables)
        if args.table is not None:
            requests = table_requests(variables, args.table)
        else:
            if args.example is None:
                raise ConfigError('Error@main.', '--example is required unless --table is given')
            request = RunRequest(example=args.example, method=args.method, steps=args.steps, one_shot=args.one_shot,
                                 m=args.m, k=args.k, T=args.T, eps=args.eps, tol=args.tol,
                                 tail_tol=args.tail_tol, min_sweeps=args.min_sweeps)
            requests = runner.expand(request, parse_sweep(args.sweep)) if args.sweep else [request]
        if args.threads is not None and args.threads < 1:
            raise ConfigError('Error@main.', f'--threads must be positive, got {args.threads}')
        reports = runner.sweep(requests, threads=args.threads)
    except (ValueError, OSError) as e:
        logger.error(f'{type(e).__name__} occurred, args={str(e.args)}')
        logger.debug(traceback.format_exc())
        return EXIT_CONFIG

    table = ReportTable(data=reports)
    text = table.render(args.format)
    if args.out:
        table.save(args.out, args.format)
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')
    if args.table is not None:
        logger.info('\n%s', comparison(variables, args.table, reports))
    return EXIT_FAILED if table.failed else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
