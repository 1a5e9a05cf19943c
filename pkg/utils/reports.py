"""This module provides the run report and the table that renders a set of reports."""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Dict, Iterable, List, Optional

from tabulate import tabulate


CSV_HEADER: List[str] = ['method', 'example', 'steps', 'm', 'k', 'matvecs', 'rel_l2_error', 'wall_seconds',
                         'status']
STATUS_OK: str = 'ok'


@dataclass
class RunReport:
    """
    One row of a benchmark table.

    :ivar method: ``semiglobal``, ``rk4`` or ``rk45``.
    :ivar example: ``advection``, ``oscillator`` or ``gpe``; empty for ad hoc problems.
    :ivar steps: number of time steps (accepted steps for rk45).
    :ivar m: nodes per slab, semiglobal only.
    :ivar k: Chebyshev terms, semiglobal only.
    :ivar matvecs: operator applications (counter delta).
    :ivar rel_l2_error: ``||u - u_ref|| / ||u_ref||`` at the final time.
    :ivar wall_seconds: elapsed wall time.
    :ivar status: ``ok`` or the failure reason.
    :ivar sweeps: first-step sweeps, semiglobal only.
    :ivar junction_gap: largest predictor/corrector difference, semiglobal only.
    :ivar accepted: accepted steps, rk45 only.
    :ivar rejected: rejected steps, rk45 only.
    """
    method: str
    example: str = ''
    steps: int = 0
    m: Optional[int] = None
    k: Optional[int] = None
    matvecs: int = 0
    rel_l2_error: float = math.nan
    wall_seconds: float = 0.0
    status: str = STATUS_OK
    sweeps: Optional[int] = None
    junction_gap: Optional[float] = None
    accepted: Optional[int] = None
    rejected: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def row(self) -> List:
        """Values in :data:`CSV_HEADER` order."""
        return [getattr(self, name) for name in CSV_HEADER]

    def as_dict(self) -> Dict:
        return asdict(self)


def _optional_int(value: str) -> Optional[int]:
    return None if value in ('', 'None') else int(value)


def _csv_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ReportTable:
    """
    Collection of run reports with its rendering as CSV, JSON or a console table.

    :param header: the column names. Default is :data:`CSV_HEADER`
    :type header: List, optional
    :param data: the reports. Default is None
    :type data: List, optional

    :ivar _header: A list containing the column names
    :ivar _data: A list of :class:`RunReport`
    """

    def __init__(self, header: Optional[List] = None, data: Optional[List[RunReport]] = None) -> None:
        self._header: List = []
        self._data: List[RunReport] = []
        self.load(header, data)

    def __len__(self) -> int:
        return len(self._data)

    def __iter__(self):
        return iter(self._data)

    def load(self, header: Optional[List] = None, data: Optional[List[RunReport]] = None) -> None:
        """Replaces the header and the reports"""
        self._header = list(header) if header is not None else (self._header or list(CSV_HEADER))
        self._data = list(data) if data is not None else self._data

    def update(self, reports: Iterable[RunReport]) -> None:
        """Appends reports"""
        self._data.extend(reports)

    @property
    def header(self) -> List:
        """Gets or sets the table header"""
        return self._header

    @header.setter
    def header(self, header: List) -> None:
        self._header = header

    @property
    def data(self) -> List[RunReport]:
        """Gets or sets the reports"""
        return self._data

    @data.setter
    def data(self, data: List[RunReport]) -> None:
        self.load(data=data)

    @property
    def failed(self) -> bool:
        """True if any report is not ``ok``"""
        return any(not report.ok for report in self._data)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self._header)
        for report in self._data:
            writer.writerow([_csv_value(getattr(report, name)) for name in self._header])
        return buffer.getvalue()

    def to_json(self) -> str:
        # NaN is not valid JSON
        rows = [{key: (None if isinstance(value, float) and not math.isfinite(value) else value)
                 for key, value in report.as_dict().items()} for report in self._data]
        return json.dumps(rows, indent=2)

    def to_text(self, tablefmt: str = 'simple_grid') -> str:
        rows = [[getattr(report, name) for name in self._header] for report in self._data]
        return tabulate(rows, headers=self._header, tablefmt=tablefmt, floatfmt='.3g')

    def render(self, fmt: str = 'csv') -> str:
        """
        Renders the table

        :param fmt: ``csv``, ``json`` or ``table``
        :type fmt: str

        :return: the rendered text
        :rtype: str
        """
        renderers = {'csv': self.to_csv, 'json': self.to_json, 'table': self.to_text}
        if fmt not in renderers:
            raise ValueError('Error@ReportTable.render.', f'unknown format {fmt!r}')
        return renderers[fmt]()

    def save(self, path: str, fmt: str = 'csv') -> None:
        with open(file=path, mode='w', encoding='utf-8', newline='') as out_file:
            out_file.write(self.render(fmt))


def read_csv(text: str) -> List[RunReport]:
    """
    Parses CSV produced by :meth:`ReportTable.to_csv` back into reports.

    :param text: the CSV text.
    :type text: str

    :return: the reports
    :rtype: List[RunReport]
    """
    reports: List[RunReport] = []
    known = {item.name for item in fields(RunReport)}
    for row in csv.DictReader(io.StringIO(text)):
        values = {key: value for key, value in row.items() if key in known}
        reports.append(RunReport(
            method=values['method'],
            example=values.get('example', ''),
            steps=int(values.get('steps') or 0),
            m=_optional_int(values.get('m', '')),
            k=_optional_int(values.get('k', '')),
            matvecs=int(values.get('matvecs') or 0),
            rel_l2_error=float(values.get('rel_l2_error') or math.nan),
            wall_seconds=float(values.get('wall_seconds') or 0.0),
            status=values.get('status', STATUS_OK),
        ))
    return reports
