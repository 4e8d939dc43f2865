"""
Management command to pivot report files into a classifier x condition table.
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from evaluation.reports import format_table, read_reports_csv, report_tables, write_table_csv
from evaluation.services import EvaluationError


class Command(BaseCommand):
    help = 'Combine report CSVs into one table (4 significant digits on screen, full precision in --out)'

    def add_arguments(self, parser):
        parser.add_argument('--reports', nargs='+', required=True, help='Report CSVs from evaluate/crossval')
        parser.add_argument('--out', default=None, help='Table CSV to write')

    def handle(self, *args, **options):
        rows = []
        for name in options['reports']:
            path = Path(name)
            if not path.is_file():
                raise CommandError(f"File not found: {path}")
            try:
                rows.extend(read_reports_csv(path.read_text(encoding='utf-8')))
            except EvaluationError as e:
                raise CommandError(f"Invalid report file {path}: {e}")

        try:
            table = report_tables(rows)
        except EvaluationError as e:
            raise CommandError(str(e))

        if options['out']:
            out = Path(options['out'])
            with out.open('w', encoding='utf-8', newline='') as stream:
                write_table_csv(table, stream)
            self.stdout.write(self.style.SUCCESS(f'Wrote {len(table.classifiers)} row(s) to {out}'))
        self.stdout.write(format_table(table))
