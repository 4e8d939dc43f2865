"""
Management command to score baselines and a trained ensemble by misclassification penalty.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cspsel.loaders import check_feature_schema, load_ensemble_file, load_features, load_runtime_data
from evaluation.baselines import BASELINES, EnsembleChooser, baseline
from evaluation.reports import format_table, report_tables, write_reports_csv
from evaluation.services import EvaluationError, evaluate, overhead_summary
from pipeline.services import PipelineError

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Evaluate baselines and (optionally) a trained ensemble on labeled runtimes'

    def add_arguments(self, parser):
        parser.add_argument('--features', required=True, help='Features CSV')
        parser.add_argument('--runtimes', required=True, help='Runtime CSV')
        parser.add_argument('--solvers', required=True, help='Solvers file')
        parser.add_argument('--ensemble', default=None, help='Ensemble file to evaluate')
        parser.add_argument(
            '--baselines', default=','.join(BASELINES), help=f"Comma list from {','.join(BASELINES)} (or 'none')",
        )
        parser.add_argument('--seed', type=int, default=None, help='Seed for the random baseline')
        parser.add_argument('--condition', default=None, help='Condition column for the report rows')
        parser.add_argument('--timeout', type=float, default=None, help='Override the timeout in seconds')
        parser.add_argument('--out', default=None, help='Long-format report CSV to write')

    def handle(self, *args, **options):
        kinds = self._parse_baselines(options['baselines'])
        solvers, matrix = load_runtime_data(options['runtimes'], options['solvers'], options['timeout'])
        vectors = load_features(options['features'])
        ensemble = None
        if options['ensemble']:
            ensemble = load_ensemble_file(options['ensemble'])
            check_feature_schema(vectors, ensemble, options['features'])
            if ensemble.solvers.names != solvers.names:
                raise CommandError(
                    f"Ensemble {options['ensemble']} was trained for solvers {', '.join(ensemble.solvers.names)}, "
                    f"not {', '.join(solvers.names)}"
                )

        condition = options['condition']
        if condition is None:
            condition = 'baseline' if ensemble is None else ('cost_model' if ensemble.duplicate else 'all_equal')

        try:
            reports = [evaluate(baseline(kind, matrix, options['seed']), vectors, matrix, condition=condition)
                       for kind in kinds]
            if ensemble is not None:
                meta = evaluate(EnsembleChooser('meta', ensemble), vectors, matrix, condition=condition)
                individual = [
                    evaluate(EnsembleChooser(learner, ensemble.sub_ensemble(learner)), vectors, matrix,
                             condition=condition)
                    for learner in ensemble.learners
                ]
                best = min(individual, key=lambda r: r.total_penalty)
                worst = max(individual, key=lambda r: r.total_penalty)
                reports += [
                    best.with_name(f'best_individual:{best.classifier}'),
                    worst.with_name(f'worst_individual:{worst.classifier}'),
                    meta,
                ]
        except (EvaluationError, PipelineError) as e:
            logger.error(f"Evaluation failed: {e}", exc_info=True)
            raise CommandError(f"Evaluation failed: {e}")

        if not reports:
            raise CommandError("Nothing to evaluate: no baselines and no --ensemble")

        if options['out']:
            out = Path(options['out'])
            with out.open('w', encoding='utf-8', newline='') as stream:
                write_reports_csv(reports, stream)
            self.stdout.write(self.style.SUCCESS(f'Wrote {len(reports)} report row(s) to {out}'))

        self.stdout.write(format_table(report_tables(reports)))
        dont_know = reports[0].dont_know
        if dont_know:
            self.stdout.write(self.style.WARNING(f'{dont_know} instance(s) unsolved by every solver were excluded'))

        by_name = {r.classifier: r for r in reports}
        if ensemble is not None and 'default' in by_name:
            overhead = overhead_summary(by_name['meta'], by_name['default'])
            self.stdout.write(
                f'\nPer instance: feature time {overhead.mean_feature_seconds:.4f}s, '
                f'predict time {overhead.mean_predict_seconds:.6f}s, '
                f'saving over default {overhead.mean_saving:.4g}s '
                f'({overhead.net_saving:.4g}s after overhead)'
            )

    def _parse_baselines(self, value):
        if value.strip() == 'none':
            return []
        kinds = [kind.strip() for kind in value.split(',') if kind.strip()]
        unknown = [kind for kind in kinds if kind not in BASELINES]
        if unknown:
            raise CommandError(f"Unknown baseline(s) {', '.join(unknown)} (available: {', '.join(BASELINES)})")
        return kinds
