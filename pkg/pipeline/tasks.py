"""
Celery tasks for ensemble training.
"""
import logging

import numpy as np

from performance.services import SolverSet

from .services import LabeledRow, MemberJob, train_member

logger = logging.getLogger(__name__)

# Import Celery safely
try:
    from celery import shared_task
    CELERY_TASKS_AVAILABLE = True
except Exception as e:
    logger.warning(f"Celery tasks not available: {e}")
    CELERY_TASKS_AVAILABLE = False

    # Create a dummy decorator
    def shared_task(*args, **kwargs):
        def decorator(func):
            return func
        return decorator


def member_payload(training, job, solvers, params):
    """JSON-serialisable description of one member's training job."""
    rows = [training[i] for i in job.train_rows]
    return {
        'learner': job.learner,
        'fold': job.fold,
        'values': [list(row.values) for row in rows],
        'labels': [row.label for row in rows],
        'solvers': solvers.to_dict(),
        'params': params,
    }


@shared_task(name='pipeline.train_member')
def train_member_task(payload):
    """
    Train one (learner, fold) hierarchical member.

    Returns:
        dict with ``learner``, ``fold`` and the serialised model levels
    """
    logger.info(f"train_member started: {payload['learner']} fold {payload['fold']}")
    solvers = SolverSet.from_dict(payload['solvers'])
    rows = [
        LabeledRow(f'row{i}', tuple(values), label, 0.0)
        for i, (values, label) in enumerate(zip(payload['values'], payload['labels']))
    ]
    job = MemberJob(payload['learner'], payload['fold'], np.arange(len(rows)))
    member = train_member(rows, job, solvers, payload['params'])
    return {'fold': member.fold, **member.model.to_dict()}
