"""
Management command for cross-validated per-learner penalties with and without cost duplication.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cspsel.conf import get_setting
from cspsel.loaders import load_features, load_runtime_data
from evaluation.baselines import LookupChooser
from evaluation.reports import format_table, report_tables, write_reports_csv
from evaluation.services import EvaluationError, cross_validated_choices, evaluate
from learners.services import learner_params
from performance.services import label_matrix
from pipeline.management.commands.train import parse_learners
from pipeline.services import PipelineError, join_rows

logger = logging.getLogger(__name__)

CONDITIONS = (('all_equal', False), ('cost_model', True))


class Command(BaseCommand):
    help = 'Cross-validate each learner under the all_equal and cost_model conditions'

    def add_arguments(self, parser):
        parser.add_argument('--features', required=True, help='Features CSV')
        parser.add_argument('--runtimes', required=True, help='Runtime CSV')
        parser.add_argument('--solvers', required=True, help='Solvers file')
        parser.add_argument('--learners', default=None, help='Comma list of learners')
        parser.add_argument('--folds', type=int, default=None, help='Fold count (default: 3)')
        parser.add_argument('--seed', type=int, default=None, help='Seed for fold assignment')
        parser.add_argument('--timeout', type=float, default=None, help='Override the timeout in seconds')
        parser.add_argument('--out', default=None, help='Long-format report CSV to write')

    def handle(self, *args, **options):
        learners = parse_learners(options['learners'])
        k = options['folds'] if options['folds'] is not None else get_setting('FOLDS')
        seed = options['seed'] if options['seed'] is not None else get_setting('SEED')
        solvers, matrix = load_runtime_data(options['runtimes'], options['solvers'], options['timeout'])
        vectors = load_features(options['features'])

        reports = []
        try:
            rows = join_rows(vectors, label_matrix(matrix))
            for learner in learners:
                for condition, duplicate in CONDITIONS:
                    choices = cross_validated_choices(
                        rows, learner, k, seed, duplicate, solvers=solvers, params=learner_params(learner),
                    )
                    reports.append(evaluate(LookupChooser(learner, choices), vectors, matrix, condition=condition))
                self.stdout.write(f'  {learner}: done')
        except (EvaluationError, PipelineError) as e:
            logger.error(f"Cross-validation failed: {e}", exc_info=True)
            raise CommandError(f"Cross-validation failed: {e}")

        if options['out']:
            out = Path(options['out'])
            with out.open('w', encoding='utf-8', newline='') as stream:
                write_reports_csv(reports, stream)
            self.stdout.write(self.style.SUCCESS(f'Wrote {len(reports)} report row(s) to {out}'))
        self.stdout.write(format_table(report_tables(reports)))
