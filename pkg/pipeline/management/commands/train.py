"""
Management command to train the majority-vote ensemble.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cspsel.conf import get_setting
from cspsel.loaders import load_features, load_labels, load_solvers
from learners.base import LearnerError
from learners.services import LEARNER_NAMES, learner_params, validate_learners
from pipeline.persistence import save_ensemble
from pipeline.services import (
    Ensemble,
    EnsembleMember,
    HierarchicalModel,
    PipelineError,
    join_rows,
    plan_members,
    train_meta,
)

logger = logging.getLogger(__name__)


def parse_learners(value):
    names = [name.strip() for name in value.split(',') if name.strip()] if value else get_setting('LEARNERS')
    try:
        return validate_learners(names)
    except LearnerError as e:
        raise CommandError(f"{e} (available: {', '.join(LEARNER_NAMES)})")


class Command(BaseCommand):
    help = 'Train k x |learners| hierarchical members and save the majority-vote ensemble'

    def add_arguments(self, parser):
        parser.add_argument('--features', required=True, help='Features CSV')
        parser.add_argument('--labels', required=True, help='Labels CSV')
        parser.add_argument('--solvers', required=True, help='Solvers file')
        parser.add_argument('--out', required=True, help='Ensemble file to write')
        parser.add_argument('--learners', default=None, help=f"Comma list from {','.join(LEARNER_NAMES)}")
        parser.add_argument('--folds', type=int, default=None, help='Fold count (default: 3)')
        parser.add_argument('--seed', type=int, default=None, help='Seed for fold assignment')
        parser.add_argument(
            '--no-duplicate', action='store_true', help='Train every instance once instead of by cost',
        )
        parser.add_argument(
            '--strict-folds', action='store_true', help='Keep all copies of an instance in one fold',
        )
        parser.add_argument('--celery', action='store_true', help='Train members on Celery workers')

    def handle(self, *args, **options):
        learners = parse_learners(options['learners'])
        k = options['folds'] if options['folds'] is not None else get_setting('FOLDS')
        seed = options['seed'] if options['seed'] is not None else get_setting('SEED')
        solvers = load_solvers(options['solvers'])
        vectors = load_features(options['features'])
        labels = load_labels(options['labels'], solvers)

        try:
            rows = join_rows(vectors, labels)
            settings = dict(
                solvers=solvers, feature_names=vectors[0].names,
                duplicate=not options['no_duplicate'], strict_folds=options['strict_folds'],
            )
            if options['celery']:
                ensemble = self._train_with_celery(rows, learners, k, seed, **settings)
            else:
                ensemble = train_meta(rows, learners, k, seed, **settings)
        except PipelineError as e:
            logger.error(f"Training failed: {e}", exc_info=True)
            raise CommandError(f"Training failed: {e}")

        out = Path(options['out'])
        save_ensemble(ensemble, out)
        dont_know = sum(1 for label in labels if label.dont_know)
        self.stdout.write(self.style.SUCCESS(
            f'Saved ensemble of {len(ensemble.members)} members ({len(learners)} learners x {k} folds) to {out}'
        ))
        self.stdout.write(f'  Training instances: {len(rows) - dont_know} (dont_know excluded: {dont_know})')

    def _train_with_celery(self, rows, learners, k, seed, *, solvers, feature_names, duplicate, strict_folds):
        from pipeline.tasks import CELERY_TASKS_AVAILABLE, member_payload, train_member_task

        if not CELERY_TASKS_AVAILABLE:
            raise CommandError("--celery requested but Celery is not installed")
        params = {name: learner_params(name) for name in learners}
        training, jobs = plan_members(rows, learners, k, seed, duplicate=duplicate, strict_folds=strict_folds)
        results = [
            train_member_task.delay(member_payload(training, job, solvers, params[job.learner]))
            for job in jobs
        ]
        members = []
        for job, result in zip(jobs, results):
            try:
                data = result.get()
            except PipelineError:
                raise
            except Exception as e:
                logger.error(f"Celery training failed for {job.learner} fold {job.fold}: {e}", exc_info=True)
                raise CommandError(f"Training failed for {job.learner} fold {job.fold}: {e}")
            members.append(EnsembleMember(data['learner'], data['fold'], HierarchicalModel.from_dict(data, solvers)))
        return Ensemble(
            solvers=solvers, feature_names=tuple(feature_names), learners=learners, k=k, members=members,
            params=params, duplicate=duplicate, strict_folds=strict_folds, seed=seed,
        )
