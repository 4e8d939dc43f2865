"""
Tests for report files and tables.
"""
import io
import math

import pytest

from evaluation.reports import (
    REPORT_HEADER,
    ReportRow,
    format_table,
    format_value,
    read_reports_csv,
    report_tables,
    write_reports_csv,
    write_table_csv,
)
from evaluation.services import EvaluationError, EvaluationReport, InstanceOutcome


def _report(classifier, condition, total, feature_set='full'):
    outcome = InstanceOutcome('i0', 'gac', total, 0.25, 0.001)
    return EvaluationReport(classifier, condition, feature_set, (outcome,))


@pytest.fixture
def reports():
    return [
        _report('oracle', 'all_equal', 0.0),
        _report('tree', 'all_equal', 1234.5678),
        _report('knn', 'all_equal', 98.7654321),
        _report('oracle', 'cost_model', 0.0),
        _report('tree', 'cost_model', 1000.0),
        _report('knn', 'cost_model', 12.5),
    ]


class TestReportTables:
    """Test report_tables."""

    def test_shape(self, reports):
        """Test three classifiers by two conditions."""
        table = report_tables(reports)
        assert table.classifiers == ('oracle', 'tree', 'knn')
        assert table.columns == ('all_equal', 'cost_model')
        assert table.cell('tree', 'cost_model') == 1000.0

    def test_oracle_displays_zero(self, reports):
        """Test the oracle row renders as 0."""
        lines = format_table(report_tables(reports)).splitlines()
        assert lines[1].split() == ['oracle', '0', '0']

    def test_display_rounding(self, reports):
        """Test four significant digits on screen."""
        lines = format_table(report_tables(reports)).splitlines()
        assert lines[2].split()[1] == '1235'
        assert lines[3].split()[1] == '98.77'

    def test_empty(self):
        """Test an empty report list."""
        with pytest.raises(EvaluationError):
            report_tables([])

    def test_mixed_feature_sets(self):
        """Test columns split by feature set when rows mix them."""
        table = report_tables([_report('meta', 'cost_model', 5.0), _report('meta', 'cost_model', 7.0, 'cheap')])
        assert table.columns == ('cost_model/full', 'cost_model/cheap')

    def test_missing_cell(self):
        """Test an absent (classifier, condition) pair."""
        table = report_tables([_report('a', 'x', 1.0), _report('b', 'y', 2.0)])
        assert math.isnan(table.cell('a', 'y'))
        assert format_value(table.cell('a', 'y')) == '-'

    def test_table_csv_precision(self, reports):
        """Test the table CSV keeps full precision."""
        stream = io.StringIO()
        write_table_csv(report_tables(reports), stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == 'classifier,all_equal,cost_model'
        name, all_equal, cost_model = lines[2].split(',')
        assert (name, float(all_equal), cost_model) == ('tree', 1234.5678, '1000')


class TestReportsCsv:
    """Test the long report CSV."""

    def test_write_and_read(self, reports):
        """Test rows survive the file."""
        stream = io.StringIO()
        write_reports_csv(reports, stream)
        assert stream.getvalue().splitlines()[0] == ','.join(REPORT_HEADER)
        rows = read_reports_csv(stream.getvalue())
        assert rows[1] == ReportRow('tree', 'all_equal', 'full', 1234.5678, 1, 0, 0.25, 0.001)

    def test_bad_header(self):
        """Test a file with another header."""
        with pytest.raises(EvaluationError, match='header'):
            read_reports_csv('instance,solver\n')

    def test_bad_row(self):
        """Test a non-numeric total."""
        text = ','.join(REPORT_HEADER) + '\nmeta,x,full,lots,1,0,0,0\n'
        with pytest.raises(EvaluationError, match='Line 2'):
            read_reports_csv(text)
