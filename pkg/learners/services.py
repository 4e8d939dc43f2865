"""
Learner registry: train any base learner by name with configured defaults.
"""
import logging
from typing import Callable, Dict

from cspsel.conf import get_setting

from .base import LearnerError, Model, TrainingSet
from .bayes import train_naive_bayes
from .neighbours import train_knn
from .rules import train_one_r, train_zero_r
from .tree import train_decision_tree

logger = logging.getLogger(__name__)

LEARNER_NAMES = ('zeror', 'oner', 'nbayes', 'knn', 'tree')

_TRAINERS: Dict[str, Callable[..., Model]] = {
    'zeror': train_zero_r,
    'oner': train_one_r,
    'nbayes': train_naive_bayes,
    'knn': train_knn,
    'tree': train_decision_tree,
}

# Hyperparameter name -> CSPSEL setting
_PARAM_SETTINGS = {
    'zeror': {},
    'oner': {'min_bucket': 'ONER_MIN_BUCKET'},
    'nbayes': {'var_floor': 'NB_VAR_FLOOR'},
    'knn': {'k': 'KNN_K'},
    'tree': {'max_depth': 'TREE_MAX_DEPTH', 'min_leaf': 'TREE_MIN_LEAF'},
}


def learner_params(name: str) -> dict:
    """Configured hyperparameters of a learner."""
    if name not in _TRAINERS:
        raise LearnerError(f"Unknown learner {name!r}; choose from {', '.join(LEARNER_NAMES)}")
    return {param: get_setting(setting) for param, setting in _PARAM_SETTINGS[name].items()}


def validate_learners(names) -> tuple:
    names = tuple(names)
    if not names:
        raise LearnerError("At least one learner is required")
    for name in names:
        learner_params(name)
    if len(set(names)) != len(names):
        raise LearnerError(f"Duplicate learners: {names}")
    return names


def train(name: str, ts: TrainingSet, **params) -> Model:
    """
    Train learner ``name``; omitted hyperparameters come from settings.

    Raises:
        LearnerError: Unknown learner or hyperparameter, or empty training set
    """
    resolved = learner_params(name)
    unknown = set(params) - set(resolved)
    if unknown:
        raise LearnerError(f"Unknown hyperparameters for {name}: {sorted(unknown)}")
    resolved.update(params)
    return _TRAINERS[name](ts, **resolved)
