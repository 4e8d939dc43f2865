"""
Misclassification-penalty evaluation of choosers.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from cspsel.conf import resolve
from features.services import FeatureVector
from learners.base import LearnerError
from performance.services import DONT_KNOW, RuntimeMatrix, SolverSetError, penalty_table
from pipeline.services import (
    LabeledRow,
    PipelineError,
    duplicate_by_cost,
    stratified_kfold,
    train_hierarchical,
)

logger = logging.getLogger(__name__)

Chooser = Callable[[FeatureVector], str]


class EvaluationError(Exception):
    """Custom exception for evaluation errors."""
    pass


@dataclass(frozen=True)
class InstanceOutcome:
    instance: str
    solver: str
    penalty: float
    feature_seconds: float
    predict_seconds: float


@dataclass(frozen=True)
class EvaluationReport:
    """
    Penalties of one chooser over a benchmark.

    Instances no solver solved are excluded and counted in ``dont_know``.
    """

    classifier: str
    condition: str
    feature_set: str
    outcomes: Tuple[InstanceOutcome, ...]
    dont_know: int = 0

    @property
    def instances(self) -> int:
        return len(self.outcomes)

    @property
    def total_penalty(self) -> float:
        return math.fsum(o.penalty for o in self.outcomes)

    @property
    def feature_seconds(self) -> float:
        return math.fsum(o.feature_seconds for o in self.outcomes)

    @property
    def predict_seconds(self) -> float:
        return math.fsum(o.predict_seconds for o in self.outcomes)

    def choices(self) -> Dict[str, str]:
        return {o.instance: o.solver for o in self.outcomes}

    def with_name(self, classifier: str) -> 'EvaluationReport':
        return EvaluationReport(classifier, self.condition, self.feature_set, self.outcomes, self.dont_know)


def total_penalty(report: EvaluationReport) -> float:
    return report.total_penalty


def _check_instances(features: Sequence[FeatureVector], matrix: RuntimeMatrix) -> None:
    names = [v.instance for v in features]
    if len(set(names)) != len(names):
        raise EvaluationError("Features list an instance more than once")
    missing_runs = sorted(set(names) - set(matrix.instances))
    missing_features = sorted(set(matrix.instances) - set(names))
    if missing_runs or missing_features:
        raise EvaluationError(
            f"Features and runtimes cover different instances "
            f"(no runtimes: {missing_runs[:5]}, no features: {missing_features[:5]})"
        )


def evaluate(chooser: Chooser, features: Sequence[FeatureVector], matrix: RuntimeMatrix, *,
             name: Optional[str] = None, condition: str = 'default',
             timer: Callable[[], float] = time.perf_counter) -> EvaluationReport:
    """
    Ask the chooser for every instance and charge the penalty of its pick.

    Args:
        chooser: Callable FeatureVector -> solver name
        features: One vector per instance of the matrix
        matrix: Runtime matrix
        name: Classifier name for the report (defaults to ``chooser.name``)
        condition: Report condition column (e.g. ``all_equal``, ``cost_model``)

    Raises:
        EvaluationError: On instance-set mismatch or a pick outside the solver set
    """
    _check_instances(features, matrix)
    name = name or getattr(chooser, 'name', None) or 'classifier'
    table = penalty_table(matrix)
    feature_set = features[0].feature_set.value if features else ''

    outcomes: List[InstanceOutcome] = []
    dont_know = 0
    for vector in features:
        i = matrix.index_of(vector.instance)
        if np.isnan(table[i, 0]):
            dont_know += 1
            continue
        started = timer()
        solver = chooser(vector)
        elapsed = timer() - started
        try:
            j = matrix.solvers.index(solver)
        except SolverSetError:
            raise EvaluationError(f"{name} chose {solver!r} for {vector.instance}, which is not a solver") from None
        outcomes.append(InstanceOutcome(
            instance=vector.instance,
            solver=solver,
            penalty=float(table[i, j]),
            feature_seconds=vector.extract_seconds,
            predict_seconds=elapsed,
        ))
    report = EvaluationReport(name, condition, feature_set, tuple(outcomes), dont_know)
    logger.info(f"{name} ({condition}): total penalty {report.total_penalty:.1f}s over {report.instances} instances")
    return report


def cross_validated_choices(rows: Sequence[LabeledRow], learner: str, k: Optional[int] = None,
                            rng: Union[np.random.Generator, int, None] = None, duplicate: bool = True, *,
                            solvers, params: Optional[dict] = None) -> Dict[str, str]:
    """
    Held-out pick for every instance from a k-fold run of one learner.

    Folds are stratified over instances. Each fold is predicted by a
    hierarchical model trained on the other folds, duplicated by cost when
    ``duplicate`` is set; dont_know rows never reach training.

    Returns:
        instance -> chosen solver
    """
    k = resolve(k, 'FOLDS')
    try:
        folds = stratified_kfold(rows, k, rng)
    except PipelineError as e:
        raise EvaluationError(f"Cannot fold {len(rows)} instances: {e}") from e

    choices: Dict[str, str] = {}
    for held_out in folds:
        held = set(held_out.tolist())
        train_rows = [row for i, row in enumerate(rows) if i not in held]
        if duplicate:
            train_rows = duplicate_by_cost(train_rows)
        else:
            train_rows = [row for row in train_rows if row.label != DONT_KNOW]
        if not train_rows:
            raise EvaluationError(f"A training fold for {learner} holds only dont_know instances")
        try:
            model = train_hierarchical(train_rows, learner, solvers, **(params or {}))
        except (PipelineError, LearnerError) as e:
            raise EvaluationError(f"Cross-validating {learner} failed: {e}") from e
        for i in held_out:
            choices[rows[i].instance] = model.predict(rows[i].values)
    return choices


@dataclass(frozen=True)
class OverheadSummary:
    """Per-instance decision overhead against the default decision."""

    instances: int
    mean_feature_seconds: float
    mean_predict_seconds: float
    mean_saving: float
    net_saving: float


def overhead_summary(report: EvaluationReport, default_report: EvaluationReport) -> OverheadSummary:
    """
    Mean saving per instance over the default decision, before and after
    charging feature and prediction time.
    """
    n = report.instances
    if n == 0:
        return OverheadSummary(0, 0.0, 0.0, 0.0, 0.0)
    if default_report.instances != n:
        raise EvaluationError("Reports cover different numbers of instances")
    feature = report.feature_seconds / n
    predict = report.predict_seconds / n
    saving = (default_report.total_penalty - report.total_penalty) / n
    return OverheadSummary(n, feature, predict, saving, saving - feature - predict)
