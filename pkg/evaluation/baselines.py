"""
Reference choosers: oracle, anti-oracle, default decision and random decision.

A chooser is any callable taking a FeatureVector and returning a solver name.
The baselines ignore the attribute values and look the instance up in the
runtime matrix they were built from.
"""
import logging
from typing import Dict, Mapping, Optional

import numpy as np

from cspsel.conf import resolve
from features.services import FeatureVector
from performance.services import RuntimeMatrix, penalty_table

from .services import EvaluationError

logger = logging.getLogger(__name__)

BASELINES = ('oracle', 'anti_oracle', 'default', 'random')


class LookupChooser:
    """Chooser backed by a fixed instance -> solver mapping."""

    def __init__(self, name: str, choices: Mapping[str, str]):
        self.name = name
        self.choices: Dict[str, str] = dict(choices)

    def for_instance(self, instance: str) -> str:
        try:
            return self.choices[instance]
        except KeyError:
            raise EvaluationError(f"{self.name} has no choice for instance {instance!r}") from None

    def __call__(self, vector: FeatureVector) -> str:
        return self.for_instance(vector.instance)

    def __repr__(self):
        return f'<{self.__class__.__name__} {self.name} ({len(self.choices)} instances)>'


class EnsembleChooser:
    """Chooser that asks a trained ensemble."""

    def __init__(self, name: str, ensemble):
        self.name = name
        self.ensemble = ensemble

    def __call__(self, vector: FeatureVector) -> str:
        return self.ensemble.predict(vector.values)


def oracle(matrix: RuntimeMatrix) -> LookupChooser:
    """Fastest solved solver per instance, ties to the earlier solver."""
    masked = np.where(matrix.solved, matrix.cpu, np.inf)
    picks = masked.argmin(axis=1)
    return LookupChooser('oracle', {
        name: matrix.solvers.names[j] for name, j in zip(matrix.instances, picks)
    })


def anti_oracle(matrix: RuntimeMatrix) -> LookupChooser:
    """Largest-penalty solver per instance, ties to the earlier solver."""
    table = np.nan_to_num(penalty_table(matrix), nan=0.0)
    picks = table.argmax(axis=1)
    return LookupChooser('anti_oracle', {
        name: matrix.solvers.names[j] for name, j in zip(matrix.instances, picks)
    })


def default_decision(matrix: RuntimeMatrix) -> LookupChooser:
    default = matrix.solvers.default_name
    return LookupChooser('default', {name: default for name in matrix.instances})


def random_decision(matrix: RuntimeMatrix, seed: Optional[int] = None) -> LookupChooser:
    """
    Uniform choice over all solvers.

    One draw per instance in matrix (name) order, so the picks do not depend
    on the order instances are evaluated in.
    """
    rng = np.random.default_rng(resolve(seed, 'SEED'))
    picks = rng.integers(0, len(matrix.solvers), size=len(matrix))
    return LookupChooser('random', {
        name: matrix.solvers.names[j] for name, j in zip(matrix.instances, picks)
    })


def baseline(kind: str, matrix: RuntimeMatrix, seed: Optional[int] = None) -> LookupChooser:
    """
    Build a baseline chooser by name.

    Raises:
        EvaluationError: For an unknown kind
    """
    if kind == 'oracle':
        return oracle(matrix)
    if kind == 'anti_oracle':
        return anti_oracle(matrix)
    if kind == 'default':
        return default_decision(matrix)
    if kind == 'random':
        return random_decision(matrix, seed)
    raise EvaluationError(f"Unknown baseline {kind!r} (available: {', '.join(BASELINES)})")
