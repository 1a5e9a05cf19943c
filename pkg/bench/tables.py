"""
Published tables: expands a table into run requests and lines the measured rows up with
the published ones.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import math
from typing import Dict, List

from tabulate import tabulate

from bench.runner import RunRequest
from utils.config import Variables
from utils.reports import RunReport


COMPARISON_HEADER: List[str] = ['steps', 'matvecs', 'published matvecs', 'error', 'published error',
                                'orders off', 'status']


def table_requests(variables: Variables, number: int) -> List[RunRequest]:
    """
    Run requests reproducing the rows of a published table. A table may set its own
    ``tail_tol`` and ``min_sweeps``; the published m = k runs need an explicit tail tolerance.

    :param variables: static definitions.
    :type variables: Variables
    :param number: table number.
    :type number: int
    :raises ConfigError: for an unknown table.
    :return: one request per row.
    :rtype: List[RunRequest]
    """
    table = variables.table(number)
    return [RunRequest(example=table['example'], method=table['method'], steps=row['steps'],
                       m=table.get('m', 7), k=table.get('k', 7), tail_tol=table.get('tail_tol'),
                       min_sweeps=table.get('min_sweeps'))
            for row in table['rows']]


def orders_off(measured: float, published: float) -> float:
    """``|log10(measured / published)|``; ``inf`` if either is not positive."""
    if not (measured > 0 and published > 0) or math.isnan(measured):
        return math.inf
    return abs(math.log10(measured / published))


def comparison(variables: Variables, number: int, reports: List[RunReport]) -> str:
    """
    Side-by-side view of measured and published rows.

    :return: the rendered table
    :rtype: str
    """
    table: Dict = variables.table(number)
    rows = []
    for published, report in zip(table['rows'], reports):
        rows.append([report.steps, report.matvecs, published['matvecs'], report.rel_l2_error, published['error'],
                     orders_off(report.rel_l2_error, published['error']), report.status])
    title = f"table {number}: {table['example']}, {table['method']}"
    if table['method'] == 'semiglobal':
        title += f", m={table.get('m')}, k={table.get('k')}"
    return title + '\n' + tabulate(rows, headers=COMPARISON_HEADER, tablefmt='simple_grid', floatfmt='.3g')
