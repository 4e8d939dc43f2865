"""
Management command to extract instance attributes into a features CSV.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cspsel.conf import get_setting
from features.services import (
    FeatureError,
    FeatureSet,
    extract_file,
    vector_from_payload,
    write_features_csv,
)
from instances.domain import InstanceError

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Extract the 37 (full) or 29 (cheap) instance attributes for every instance file in a directory'

    def add_arguments(self, parser):
        parser.add_argument('--instances', required=True, help='Directory of instance files')
        parser.add_argument('--out', required=True, help='Features CSV to write')
        parser.add_argument(
            '--feature-set', choices=[fs.value for fs in FeatureSet], default=FeatureSet.FULL.value,
        )
        parser.add_argument('--seed', type=int, default=None, help='Seed for tightness sampling')
        parser.add_argument('--samples', type=int, default=None, help='Tightness samples per constraint')
        parser.add_argument('--pattern', default='*.csp', help='Glob for instance files (default: *.csp)')
        parser.add_argument(
            '--celery', action='store_true', help='Dispatch extraction to Celery workers',
        )

    def handle(self, *args, **options):
        directory = Path(options['instances'])
        if not directory.is_dir():
            raise CommandError(f"Instance directory not found: {directory}")
        paths = sorted(directory.glob(options['pattern']))
        if not paths:
            raise CommandError(f"No instance files matching {options['pattern']!r} in {directory}")

        seed = options['seed'] if options['seed'] is not None else get_setting('SEED')
        feature_set = options['feature_set']
        self.stdout.write(f'Extracting {feature_set} features for {len(paths)} instance(s)...')

        if options['celery']:
            vectors = self._extract_with_celery(paths, feature_set, seed, options['samples'])
        else:
            vectors = []
            for idx, path in enumerate(paths, 1):
                vectors.append(self._extract_one(path, feature_set, seed, options['samples']))
                if idx % 50 == 0:
                    self.stdout.write(f'  Processed {idx}/{len(paths)}...')

        out = Path(options['out'])
        with out.open('w', encoding='utf-8', newline='') as stream:
            write_features_csv(vectors, stream)

        mean_seconds = sum(v.extract_seconds for v in vectors) / len(vectors)
        degenerate = sum(1 for v in vectors if v.diagnostics)
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(vectors)} feature vector(s) to {out}'))
        self.stdout.write(f'  Mean extraction time: {mean_seconds:.4f}s')
        if degenerate:
            self.stdout.write(self.style.WARNING(f'  Instances with degenerate statistics: {degenerate}'))

    def _extract_one(self, path, feature_set, seed, samples):
        try:
            return extract_file(path, feature_set=feature_set, seed=seed, samples=samples)
        except InstanceError as e:
            raise CommandError(f"Cannot parse instance file {path}: {e}")
        except FeatureError as e:
            logger.error(f"Feature extraction failed for {path}: {e}", exc_info=True)
            raise CommandError(f"Feature extraction failed for {path}: {e}")

    def _extract_with_celery(self, paths, feature_set, seed, samples):
        from features.tasks import CELERY_TASKS_AVAILABLE, extract_instance_file

        if not CELERY_TASKS_AVAILABLE:
            raise CommandError("--celery requested but Celery is not installed")
        results = [
            extract_instance_file.delay(str(path), feature_set, seed, samples)
            for path in paths
        ]
        vectors = []
        for path, result in zip(paths, results):
            try:
                payload = result.get()
            except InstanceError as e:
                raise CommandError(f"Cannot parse instance file {path}: {e}")
            except Exception as e:
                logger.error(f"Celery extraction failed for {path}: {e}", exc_info=True)
                raise CommandError(f"Feature extraction failed for {path}: {e}")
            vectors.append(vector_from_payload(payload))
        return vectors
