"""
Management command to choose a solver for each instance with a trained ensemble.
"""
import csv
import logging
import time
from pathlib import Path

from django.core.management.base import BaseCommand

from cspsel.loaders import check_feature_schema, load_ensemble_file, load_features

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Predict a solver per instance (CSV instance,solver)'

    def add_arguments(self, parser):
        parser.add_argument('--ensemble', required=True, help='Ensemble file')
        parser.add_argument('--features', required=True, help='Features CSV')
        parser.add_argument('--out', required=True, help='Predictions CSV to write')

    def handle(self, *args, **options):
        ensemble = load_ensemble_file(options['ensemble'])
        vectors = load_features(options['features'])
        check_feature_schema(vectors, ensemble, options['features'])

        started = time.perf_counter()
        out = Path(options['out'])
        counts = {}
        with out.open('w', encoding='utf-8', newline='') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(['instance', 'solver'])
            for vector in vectors:
                solver = ensemble.predict(vector.values)
                counts[solver] = counts.get(solver, 0) + 1
                writer.writerow([vector.instance, solver])
        elapsed = time.perf_counter() - started

        self.stdout.write(self.style.SUCCESS(f'Wrote {len(vectors)} prediction(s) to {out}'))
        for solver in ensemble.solvers.names:
            if solver in counts:
                self.stdout.write(f'  {solver}: {counts[solver]}')
        self.stdout.write(f'  Mean predict time: {elapsed / len(vectors):.6f}s')
