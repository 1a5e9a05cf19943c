"""
Tests for run reports and their CSV / JSON / console rendering.
"""

import json
import math

import pytest

from utils.reports import CSV_HEADER, ReportTable, RunReport, read_csv


def sample_reports():
    return [
        RunReport(method='semiglobal', example='oscillator', steps=400, m=7, k=7, matvecs=5213,
                  rel_l2_error=3.9e-08, wall_seconds=1.25, sweeps=2, junction_gap=1e-9),
        RunReport(method='rk4', example='oscillator', steps=1500, matvecs=6000, rel_l2_error=5.6e-04),
        RunReport(method='semiglobal', example='advection', steps=1, m=14, k=14, matvecs=13,
                  status='TailTooLarge: tail ratio 2.7e-01 > 1.0e-11'),
    ]


class TestRunReport:

    def test_row_order(self):
        report = sample_reports()[0]
        assert report.row() == ['semiglobal', 'oscillator', 400, 7, 7, 5213, 3.9e-08, 1.25, 'ok']
        assert report.ok

    def test_defaults(self):
        report = RunReport(method='rk45')
        assert math.isnan(report.rel_l2_error)
        assert report.m is None and report.k is None
        assert report.status == 'ok'


class TestReportTable:

    def test_csv(self):
        text = ReportTable(data=sample_reports()).to_csv()
        lines = text.splitlines()
        assert lines[0] == ','.join(CSV_HEADER)
        assert lines[2] == 'rk4,oscillator,1500,,,6000,0.00056,0.0,ok'
        assert len(lines) == 4

    def test_csv_is_readable(self):
        reports = sample_reports()
        parsed = read_csv(ReportTable(data=reports).to_csv())
        assert [report.row() for report in parsed[:2]] == [report.row() for report in reports[:2]]
        assert parsed[2].status.startswith('TailTooLarge')
        assert math.isnan(parsed[2].rel_l2_error)

    def test_json(self):
        rows = json.loads(ReportTable(data=sample_reports()).to_json())
        assert rows[0]['matvecs'] == 5213
        assert rows[0]['sweeps'] == 2
        assert rows[2]['rel_l2_error'] is None

    def test_text(self):
        text = ReportTable(data=sample_reports()).render('table')
        for name in CSV_HEADER:
            assert name in text
        assert 'TailTooLarge' in text

    def test_failed(self):
        table = ReportTable(data=sample_reports()[:2])
        assert not table.failed
        table.update(sample_reports()[2:])
        assert table.failed
        assert len(table) == 3

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            ReportTable().render('xml')

    def test_save(self, tmp_path):
        path = tmp_path / 'rows.csv'
        ReportTable(data=sample_reports()).save(str(path))
        assert path.read_text(encoding='utf-8').startswith('method,example,steps')

    def test_empty(self):
        table = ReportTable()
        assert table.to_csv() == ','.join(CSV_HEADER) + '\n'
        assert json.loads(table.to_json()) == []
