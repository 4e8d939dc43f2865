"""
Management command to label instances from a runtime matrix.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand

from cspsel.loaders import load_runtime_data
from performance.services import label_matrix, portfolio_summary, write_labels_csv

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Label every instance with its best solver (or dont_know) and its misclassification cost'

    def add_arguments(self, parser):
        parser.add_argument('--runtimes', required=True, help='Runtime CSV (instance,solver,cpu_seconds,nodes,status)')
        parser.add_argument('--solvers', required=True, help='Solvers file')
        parser.add_argument('--out', required=True, help='Labels CSV to write')
        parser.add_argument('--timeout', type=float, default=None, help='Override the timeout in seconds')

    def handle(self, *args, **options):
        solvers, matrix = load_runtime_data(options['runtimes'], options['solvers'], options['timeout'])
        labels = label_matrix(matrix)

        out = Path(options['out'])
        with out.open('w', encoding='utf-8', newline='') as stream:
            write_labels_csv(labels, stream)

        summary = portfolio_summary(matrix)
        self.stdout.write(self.style.SUCCESS(f'Labeled {len(labels)} instance(s) into {out}'))
        self.stdout.write('\nFastest solver counts:')
        for name, wins in summary.wins.items():
            self.stdout.write(f'  {name}: {wins}')
        self.stdout.write(f'  dont_know: {summary.dont_know}')
        self.stdout.write(f'Instances with at least one timeout: {summary.with_timeouts}')
        self.stdout.write(
            f'Oracle speedup over {solvers.default_name}: '
            f'mean {summary.mean_default_speedup:.2f}x, max {summary.max_default_speedup:.2f}x'
        )
        if summary.dont_know:
            self.stdout.write(self.style.WARNING(
                f'{summary.dont_know} instance(s) unsolved by every solver are labeled dont_know'
            ))
