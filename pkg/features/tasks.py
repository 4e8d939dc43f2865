"""
Celery tasks for feature extraction.
"""
import logging

from .services import extract_file, vector_to_payload

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


@shared_task(name='features.extract_instance_file')
def extract_instance_file(path, feature_set='full', seed=None, samples=None):
    """
    Extract one instance file.

    Returns:
        dict payload of the FeatureVector (see ``vector_to_payload``)
    """
    logger.info(f"extract_instance_file started for {path} ({feature_set})")
    vector = extract_file(path, feature_set=feature_set, seed=seed, samples=samples)
    return vector_to_payload(vector)
