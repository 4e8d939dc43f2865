"""
Training machinery: cost duplication, stratified folds, two-level
hierarchical models and the majority-vote ensemble.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from cspsel.conf import get_setting, resolve
from features.services import FeatureVector
from learners import train
from learners.base import ConstantModel, LearnerError, Model, TrainingSet
from learners.services import learner_params, validate_learners
from performance.services import DONT_KNOW, Label, SolverSet

logger = logging.getLogger(__name__)

PROPAGATING = 'propagating'


class PipelineError(Exception):
    """Custom exception for training pipeline errors."""
    pass


@dataclass(frozen=True)
class LabeledRow:
    """Feature values of one instance with its class label and cost."""

    instance: str
    values: Tuple[float, ...]
    label: str
    cost: float


def join_rows(vectors: Sequence[FeatureVector], labels: Sequence[Label]) -> List[LabeledRow]:
    """
    Pair feature vectors with labels by instance name, in feature order.

    Raises:
        PipelineError: When the two files do not cover the same instances
    """
    by_instance = {label.instance: label for label in labels}
    names = {vector.instance for vector in vectors}
    missing_labels = sorted(names - set(by_instance))
    missing_features = sorted(set(by_instance) - names)
    if missing_labels or missing_features:
        raise PipelineError(
            f"Features and labels cover different instances "
            f"(no label: {missing_labels[:5]}, no features: {missing_features[:5]})"
        )
    return [
        LabeledRow(v.instance, v.values, by_instance[v.instance].label, by_instance[v.instance].cost)
        for v in vectors
    ]


def copies_for_cost(cost: float) -> int:
    """1 + ceil(log2(cost)), and at least 1; costs up to one second get a single copy."""
    if cost < 0 or math.isnan(cost):
        raise PipelineError(f"Cost must be non-negative, got {cost}")
    return max(1, 1 + math.ceil(math.log2(max(cost, 1.0))))


def duplicate_by_cost(rows: Sequence[LabeledRow]) -> List[LabeledRow]:
    """
    Replicate each row by its cost; dont_know rows are dropped.

    Copies of a row are adjacent and rows keep their order.
    """
    expanded = []
    for row in rows:
        copies = copies_for_cost(row.cost)
        if row.label == DONT_KNOW:
            continue
        expanded.extend([row] * copies)
    return expanded


def stratified_kfold(rows: Sequence[LabeledRow], k: Optional[int] = None,
                     rng: Union[np.random.Generator, int, None] = None,
                     groups: Optional[Sequence[str]] = None) -> List[np.ndarray]:
    """
    Split row indices into k stratified folds.

    Classes are taken in order of first appearance; each class's rows are
    shuffled and dealt round-robin, the dealing position carrying over from
    one class to the next. With ``groups`` whole groups are dealt instead of
    rows, so rows sharing a group land in one fold.

    Returns:
        k sorted index arrays partitioning range(len(rows))
    """
    k = resolve(k, 'FOLDS')
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(resolve(rng, 'SEED'))
    if k < 2:
        raise PipelineError(f"Need at least 2 folds, got {k}")

    if groups is None:
        units = [[i] for i in range(len(rows))]
    else:
        if len(groups) != len(rows):
            raise PipelineError("One group per row is required")
        members: Dict[str, List[int]] = {}
        for i, group in enumerate(groups):
            members.setdefault(group, []).append(i)
        units = list(members.values())
        for unit in units:
            if len({rows[i].label for i in unit}) > 1:
                raise PipelineError(f"Rows of group {groups[unit[0]]!r} carry different labels")
    if k > len(units):
        raise PipelineError(f"Cannot make {k} folds from {len(units)} rows")

    by_class: Dict[str, List[int]] = {}
    for u, unit in enumerate(units):
        by_class.setdefault(rows[unit[0]].label, []).append(u)

    assignment = np.empty(len(rows), dtype=np.int64)
    position = 0
    for unit_ids in by_class.values():
        for u in np.asarray(unit_ids)[rng.permutation(len(unit_ids))]:
            assignment[units[u]] = position % k
            position += 1
    return [np.flatnonzero(assignment == fold) for fold in range(k)]


class HierarchicalModel:
    """
    Two-level decision: naive versus propagating, then which propagating solver.

    Level 2 is only consulted when level 1 answers ``propagating``.
    """

    def __init__(self, solvers: SolverSet, learner: str, level1: Model, level2: Model):
        self.solvers = solvers
        self.learner = learner
        self.level1 = level1
        self.level2 = level2
        if level1.n_features != level2.n_features:
            raise PipelineError("Both levels must share one feature arity")

    @property
    def n_features(self) -> int:
        return self.level1.n_features

    def predict(self, values) -> str:
        if self.level1.predict(values) == self.solvers.naive_name:
            return self.solvers.naive_name
        return self.level2.predict(values)

    def to_dict(self) -> dict:
        return {'learner': self.learner, 'level1': self.level1.to_dict(), 'level2': self.level2.to_dict()}

    @classmethod
    def from_dict(cls, data: dict, solvers: SolverSet) -> 'HierarchicalModel':
        return cls(solvers, data['learner'], Model.from_dict(data['level1']), Model.from_dict(data['level2']))


def _fallback_variant(solvers: SolverSet) -> str:
    """Level-2 answer when no propagating rows exist: the default, unless it is the naive solver."""
    if solvers.default != solvers.naive:
        return solvers.default_name
    return solvers.propagating[0]


def train_hierarchical(rows: Sequence[LabeledRow], learner: str, solvers: SolverSet,
                       n_features: Optional[int] = None, **params) -> HierarchicalModel:
    """
    Train both levels with one learner.

    Level 1 sees every row relabeled naive/propagating; level 2 sees only rows
    labeled with a propagating solver. A level whose training rows all fall
    into one class (or that has no rows) becomes a constant model.

    Raises:
        PipelineError: On empty input or labels outside the solver set
    """
    if not rows:
        raise PipelineError("Cannot train a hierarchical model without rows")
    if PROPAGATING in solvers.names:
        raise PipelineError(f"Solver name {PROPAGATING!r} is reserved for the first level")
    unknown = {row.label for row in rows} - set(solvers.names)
    if unknown:
        raise PipelineError(f"Training labels are not solvers: {sorted(unknown)}")
    n_features = len(rows[0].values) if n_features is None else n_features

    naive = solvers.naive_name
    level1_alphabet = (naive, PROPAGATING)
    level1_labels = [naive if row.label == naive else PROPAGATING for row in rows]
    variant_rows = [row for row in rows if row.label != naive]

    try:
        if len(set(level1_labels)) == 1:
            level1 = ConstantModel.for_label(n_features, level1_alphabet, level1_labels[0])
        else:
            level1 = train(learner, TrainingSet.from_rows(
                [(row.values, label) for row, label in zip(rows, level1_labels)], level1_alphabet,
            ), **params)

        if not variant_rows:
            level2 = ConstantModel.for_label(n_features, solvers.propagating, _fallback_variant(solvers))
        elif len({row.label for row in variant_rows}) == 1:
            level2 = ConstantModel.for_label(n_features, solvers.propagating, variant_rows[0].label)
        else:
            level2 = train(learner, TrainingSet.from_rows(
                [(row.values, row.label) for row in variant_rows], solvers.propagating,
            ), **params)
    except LearnerError as e:
        raise PipelineError(f"Training {learner} failed: {e}") from e
    return HierarchicalModel(solvers, learner, level1, level2)


def predict_hierarchical(model: HierarchicalModel, values) -> str:
    return model.predict(values)


@dataclass(frozen=True)
class EnsembleMember:
    learner: str
    fold: int
    model: HierarchicalModel


@dataclass
class Ensemble:
    """
    Majority-vote combination of one hierarchical model per (learner, fold).

    Members are kept sorted by (learner position in the bank, fold).
    """

    solvers: SolverSet
    feature_names: Tuple[str, ...]
    learners: Tuple[str, ...]
    k: int
    members: List[EnsembleMember]
    params: Dict[str, dict] = field(default_factory=dict)
    duplicate: bool = True
    strict_folds: bool = False
    seed: Optional[int] = None

    def __post_init__(self):
        self.feature_names = tuple(self.feature_names)
        self.learners = tuple(self.learners)
        if not self.members:
            raise PipelineError("An ensemble needs at least one member")
        order = {name: i for i, name in enumerate(self.learners)}
        unknown = {m.learner for m in self.members} - set(order)
        if unknown:
            raise PipelineError(f"Members trained with learners outside the bank: {sorted(unknown)}")
        self.members = sorted(self.members, key=lambda m: (order[m.learner], m.fold))
        for member in self.members:
            if member.model.n_features != len(self.feature_names):
                raise PipelineError("Member feature arity does not match the feature schema")

    @property
    def tie_order(self) -> Tuple[str, ...]:
        """Default solver first, then the remaining solvers in solver order."""
        default = self.solvers.default_name
        return (default, *(n for n in self.solvers.names if n != default))

    def votes(self, values) -> Counter:
        return Counter(member.model.predict(values) for member in self.members)

    def predict(self, values) -> str:
        values = np.asarray(values, dtype=float).reshape(-1)
        if len(values) != len(self.feature_names):
            raise PipelineError(f"Ensemble expects {len(self.feature_names)} features, got {len(values)}")
        votes = self.votes(values)
        top = max(votes.values())
        return next(name for name in self.tie_order if votes.get(name) == top)

    def sub_ensemble(self, learner: str) -> 'Ensemble':
        """Only the fold members of one learner."""
        members = [m for m in self.members if m.learner == learner]
        if not members:
            raise PipelineError(f"No members trained with {learner!r}")
        return Ensemble(
            solvers=self.solvers, feature_names=self.feature_names, learners=(learner,), k=self.k,
            members=members, params={learner: self.params.get(learner, {})}, duplicate=self.duplicate,
            strict_folds=self.strict_folds, seed=self.seed,
        )


def predict_meta(ensemble: Ensemble, values) -> str:
    return ensemble.predict(values)


@dataclass(frozen=True)
class MemberJob:
    """Training rows of one ensemble member, as indices into the duplicated rows."""

    learner: str
    fold: int
    train_rows: np.ndarray


def plan_members(rows: Sequence[LabeledRow], learners: Sequence[str], k: Optional[int] = None,
                 rng: Union[np.random.Generator, int, None] = None, duplicate: bool = True,
                 strict_folds: bool = False) -> Tuple[List[LabeledRow], List[MemberJob]]:
    """
    Duplicate (or just drop dont_know rows), fold, and list one job per (learner, fold).

    Returns:
        (training rows, jobs in canonical order)
    """
    learners = validate_learners(learners)
    if duplicate:
        training = duplicate_by_cost(rows)
    else:
        training = [row for row in rows if row.label != DONT_KNOW]
    if not training:
        raise PipelineError("No labeled rows left to train on (every instance is dont_know)")
    groups = [row.instance for row in training] if strict_folds else None
    folds = stratified_kfold(training, k, rng, groups=groups)
    jobs = []
    for learner in learners:
        for fold in range(len(folds)):
            rest = np.sort(np.concatenate([f for i, f in enumerate(folds) if i != fold]))
            jobs.append(MemberJob(learner, fold, rest))
    return training, jobs


def train_member(training: Sequence[LabeledRow], job: MemberJob, solvers: SolverSet,
                 params: Optional[dict] = None) -> EnsembleMember:
    rows = [training[i] for i in job.train_rows]
    model = train_hierarchical(rows, job.learner, solvers, **(params or {}))
    return EnsembleMember(job.learner, job.fold, model)


def train_meta(rows: Sequence[LabeledRow], learners: Optional[Sequence[str]] = None,
               k: Optional[int] = None, rng: Union[np.random.Generator, int, None] = None, *,
               solvers: SolverSet, feature_names: Sequence[str], duplicate: bool = True,
               strict_folds: bool = False, params: Optional[Dict[str, dict]] = None) -> Ensemble:
    """
    Train k x |learners| hierarchical members and combine them by majority vote.

    Member (learner, i) is trained on every fold except fold i. Duplication,
    when enabled, happens before folding.

    Args:
        rows: Labeled rows (dont_know rows are dropped)
        learners: Learner bank (defaults to CSPSEL LEARNERS)
        k: Fold count (defaults to CSPSEL FOLDS)
        rng: Generator or seed for fold assignment (defaults to CSPSEL SEED)
        params: Per-learner hyperparameter overrides
    """
    learners = validate_learners(learners if learners is not None else get_setting('LEARNERS'))
    seed = rng if isinstance(rng, int) else None
    if not isinstance(rng, np.random.Generator):
        seed = resolve(rng, 'SEED')
        rng = np.random.default_rng(seed)
    k = resolve(k, 'FOLDS')
    params = {name: {**learner_params(name), **(params or {}).get(name, {})} for name in learners}

    training, jobs = plan_members(rows, learners, k, rng, duplicate=duplicate, strict_folds=strict_folds)
    logger.info(f"Training {len(jobs)} members on {len(training)} rows ({len(rows)} instances)")
    members = [train_member(training, job, solvers, params[job.learner]) for job in jobs]
    return Ensemble(
        solvers=solvers, feature_names=tuple(feature_names), learners=learners, k=k, members=members,
        params=params, duplicate=duplicate, strict_folds=strict_folds, seed=seed,
    )
