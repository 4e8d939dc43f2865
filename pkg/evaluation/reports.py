"""
Report files and classifier x condition tables.

Evaluation results are stored in a long CSV, one row per (classifier,
condition, feature set). ``report_tables`` pivots rows into a table with one
row per classifier and one column per condition.
"""
import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .services import EvaluationError, EvaluationReport

logger = logging.getLogger(__name__)

REPORT_HEADER = [
    'classifier', 'condition', 'feature_set', 'total_penalty', 'instances',
    'dont_know', 'feature_seconds', 'predict_seconds',
]


@dataclass(frozen=True)
class ReportRow:
    classifier: str
    condition: str
    feature_set: str
    total_penalty: float
    instances: int
    dont_know: int
    feature_seconds: float
    predict_seconds: float

    @classmethod
    def from_report(cls, report: EvaluationReport) -> 'ReportRow':
        return cls(
            classifier=report.classifier,
            condition=report.condition,
            feature_set=report.feature_set,
            total_penalty=report.total_penalty,
            instances=report.instances,
            dont_know=report.dont_know,
            feature_seconds=report.feature_seconds,
            predict_seconds=report.predict_seconds,
        )


def write_reports_csv(reports: Sequence[EvaluationReport], stream) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(REPORT_HEADER)
    for report in reports:
        row = ReportRow.from_report(report) if isinstance(report, EvaluationReport) else report
        writer.writerow([
            row.classifier, row.condition, row.feature_set,
            format(row.total_penalty, '.17g'), row.instances, row.dont_know,
            format(row.feature_seconds, '.17g'), format(row.predict_seconds, '.17g'),
        ])


def read_reports_csv(text: str) -> List[ReportRow]:
    """
    Parse a long-format report CSV.

    Raises:
        EvaluationError: On a wrong header or malformed row
    """
    reader = csv.reader(io.StringIO(text))
    if next(reader, None) != REPORT_HEADER:
        raise EvaluationError(f"Report file header must be {','.join(REPORT_HEADER)}")
    rows = []
    for line_no, fields in enumerate(reader, 2):
        if not fields:
            continue
        if len(fields) != len(REPORT_HEADER):
            raise EvaluationError(f"Line {line_no}: expected {len(REPORT_HEADER)} fields, got {len(fields)}")
        try:
            rows.append(ReportRow(
                classifier=fields[0],
                condition=fields[1],
                feature_set=fields[2],
                total_penalty=float(fields[3]),
                instances=int(fields[4]),
                dont_know=int(fields[5]),
                feature_seconds=float(fields[6]),
                predict_seconds=float(fields[7]),
            ))
        except ValueError as e:
            raise EvaluationError(f"Line {line_no}: {e}") from None
    return rows


@dataclass(frozen=True)
class ReportTable:
    """Total penalty per classifier (rows) and condition (columns); NaN where absent."""

    classifiers: Tuple[str, ...]
    columns: Tuple[str, ...]
    values: Tuple[Tuple[float, ...], ...]

    def cell(self, classifier: str, column: str) -> float:
        return self.values[self.classifiers.index(classifier)][self.columns.index(column)]


def report_tables(rows: Sequence) -> ReportTable:
    """
    Pivot report rows into a classifier x condition table.

    Classifiers and conditions keep their order of first appearance. When the
    rows mix feature sets the columns become ``condition/feature_set``. A
    repeated (classifier, column) keeps the last row.

    Raises:
        EvaluationError: When there are no rows
    """
    rows = [ReportRow.from_report(r) if isinstance(r, EvaluationReport) else r for r in rows]
    if not rows:
        raise EvaluationError("No classifier results to report")
    mixed = len({row.feature_set for row in rows}) > 1

    def column_of(row):
        return f'{row.condition}/{row.feature_set}' if mixed else row.condition

    classifiers = tuple(dict.fromkeys(row.classifier for row in rows))
    columns = tuple(dict.fromkeys(column_of(row) for row in rows))
    grid = [[math.nan] * len(columns) for _ in classifiers]
    for row in rows:
        grid[classifiers.index(row.classifier)][columns.index(column_of(row))] = row.total_penalty
    return ReportTable(classifiers, columns, tuple(tuple(r) for r in grid))


def write_table_csv(table: ReportTable, stream) -> None:
    """Full precision; missing cells are left empty."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['classifier', *table.columns])
    for name, values in zip(table.classifiers, table.values):
        writer.writerow([name, *('' if math.isnan(v) else format(v, '.17g') for v in values)])


def format_value(value: float) -> str:
    """Four significant digits for display."""
    if math.isnan(value):
        return '-'
    return format(value, '.4g')


def format_table(table: ReportTable) -> str:
    header = ['classifier', *table.columns]
    body = [[name, *(format_value(v) for v in values)] for name, values in zip(table.classifiers, table.values)]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(len(header))]
    lines = []
    for line in [header, *body]:
        cells = [line[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(line[1:], widths[1:])]
        lines.append('  '.join(cells))
    return '\n'.join(lines)
