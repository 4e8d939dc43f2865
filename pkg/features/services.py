"""
Instance attribute extraction.

Computes the 37 canonical attributes (or the 29 cheap ones), assembles them
into a FeatureVector and reads/writes the features CSV.
"""
import csv
import hashlib
import io
import itertools
import json
import logging
import math
import time
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from cspsel.conf import get_setting, resolve
from instances.domain import ConstraintKind, Instance
from instances.parser import parse_instance
from instances.semantics import count_violations, enumerate_tuples, sample_valid_tuples

from .graph import (
    build_primal_graph,
    clustering_coefficient,
    degree_stats,
    edge_density,
    width_of_graph,
    width_of_ordering,
)
from .symmetry import symmetry_proportion

logger = logging.getLogger(__name__)


class FeatureError(Exception):
    """Custom exception for feature extraction errors."""
    pass


class FeatureFileError(FeatureError):
    """Raised when a features CSV is malformed or has an unexpected schema."""
    pass


def _stat_names(prefix):
    return tuple(f'{prefix}_{s}' for s in ('min', 'q1', 'median', 'q3', 'max', 'mean'))


GRAPH_FEATURES = (
    'edge_density', 'clustering', 'deg_min', 'deg_max', 'deg_mean', 'deg_median',
    'deg_sd', 'width_ordering', 'width_graph',
)
# Primal-graph attributes dropped from the cheap set (edge density stays)
EXPENSIVE_FEATURES = GRAPH_FEATURES[1:]

FULL_FEATURES = (
    GRAPH_FEATURES
    + _stat_names('dom')
    + _stat_names('arity')
    + ('multi_shared', 'con_per_var', 'aux_ratio')
    + _stat_names('tight')
    + ('sym_prop',)
    + _stat_names('ad')
)
CHEAP_FEATURES = tuple(name for name in FULL_FEATURES if name not in EXPENSIVE_FEATURES)

# 9 graph + 6 domain + 6 arity + 3 scalars + 6 tightness + 1 symmetry + 6 alldifferent
if len(FULL_FEATURES) != 37:
    raise RuntimeError(f"Canonical feature list has {len(FULL_FEATURES)} entries, expected 37")
if len(CHEAP_FEATURES) != 29 or len(EXPENSIVE_FEATURES) != 8:
    raise RuntimeError("Cheap feature list must drop exactly the 8 expensive graph features")

# Attributes that are proportions by construction
NORMALISED_FEATURES = frozenset(
    GRAPH_FEATURES
    + ('multi_shared', 'con_per_var', 'sym_prop')
    + _stat_names('tight')
)


class FeatureSet(str, Enum):
    FULL = 'full'
    CHEAP = 'cheap'

    @property
    def names(self) -> Tuple[str, ...]:
        return FULL_FEATURES if self is FeatureSet.FULL else CHEAP_FEATURES

    @classmethod
    def for_names(cls, names: Sequence[str]) -> 'FeatureSet':
        names = tuple(names)
        for feature_set in cls:
            if feature_set.names == names:
                return feature_set
        raise FeatureError(f"Feature names match neither the full nor the cheap schema ({len(names)} columns)")


@dataclass(frozen=True)
class Summary6:
    """Quartiles (including min and max) plus the mean of a population."""

    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    degenerate: bool = False

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.min, self.q1, self.median, self.q3, self.max, self.mean)


def summary6(values: Iterable[float]) -> Summary6:
    """
    Quantiles at 0, .25, .5, .75 and 1 plus the mean.

    Quantiles interpolate linearly at rank h = p * (k - 1). An empty population
    yields all zeros with ``degenerate`` set.
    """
    # Sorted so the mean does not depend on population order
    array = np.sort(np.asarray(list(values), dtype=float))
    if array.size == 0:
        return Summary6(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, degenerate=True)
    quantiles = np.quantile(array, [0.0, 0.25, 0.5, 0.75, 1.0])
    return Summary6(*(float(q) for q in quantiles), mean=float(array.mean()))


def domain_features(instance: Instance) -> Summary6:
    return summary6(v.size for v in instance.variables)


def arity_features(instance: Instance) -> Summary6:
    """Arity of each constraint divided by the number of constraints."""
    m = instance.n_constraints
    return summary6(c.arity / m for c in instance.constraints)


def multiple_shared_variables(instance: Instance) -> float:
    """Proportion of constraint pairs whose scopes share at least two variables."""
    m = instance.n_constraints
    if m < 2:
        return 0.0
    by_variable: Dict[int, List[int]] = {}
    for c_index, constraint in enumerate(instance.constraints):
        for var_index in constraint.scope:
            by_variable.setdefault(var_index, []).append(c_index)
    shared = Counter()
    for constraint_indices in by_variable.values():
        shared.update(itertools.combinations(constraint_indices, 2))
    pairs = sum(1 for count in shared.values() if count >= 2)
    return pairs / (m * (m - 1) / 2)


def mean_constraints_per_variable(instance: Instance) -> float:
    """Mean number of constraints per variable, normalised by the constraint count."""
    m = instance.n_constraints
    if m == 0 or instance.n_variables == 0:
        return 0.0
    counts = np.zeros(instance.n_variables)
    for constraint in instance.constraints:
        counts[list(constraint.scope)] += 1
    return float(counts.mean() / m)


def aux_ratio(instance: Instance) -> float:
    """Auxiliary variables per non-auxiliary variable; 0 when all are auxiliary."""
    n_aux = sum(1 for v in instance.variables if v.aux)
    n_primary = instance.n_variables - n_aux
    if n_primary == 0:
        logger.debug(f"Instance {instance.name} has no non-auxiliary variables")
        return 0.0
    return n_aux / n_primary


def constraint_seed_key(constraint, instance: Instance) -> Tuple[int, ...]:
    """
    Stable key for a constraint's content, independent of declaration order.

    Covers kind, relation, polarity, scope domains and the sorted tuple set, so
    the key survives variable renaming and constraint reordering.
    """
    payload = json.dumps([
        constraint.kind.value,
        constraint.op,
        constraint.offset,
        constraint.allowed,
        [list(d) for d in instance.scope_domains(constraint)],
        sorted(list(t) for t in constraint.tuples),
    ])
    digest = hashlib.sha256(payload.encode('utf-8')).digest()
    return tuple(int.from_bytes(digest[i:i + 4], 'little') for i in range(0, len(digest), 4))


def constraint_tightness(constraint, instance: Instance, rng: np.random.Generator,
                         samples: int, exact_threshold: int) -> float:
    """Proportion of disallowed tuples; exact when the domain product is small enough."""
    product = math.prod(len(d) for d in instance.scope_domains(constraint))
    if product <= exact_threshold:
        return count_violations(constraint, enumerate_tuples(constraint, instance)) / product
    drawn = sample_valid_tuples(constraint, instance, rng, samples)
    return count_violations(constraint, drawn) / samples


def tightness_features(instance: Instance, rng: np.random.Generator, samples: Optional[int] = None,
                       exact_threshold: Optional[int] = None) -> Summary6:
    """
    Summary of per-constraint tightness.

    Each constraint is estimated from ``samples`` random domain-valid tuples,
    unless its scope's domain product is at most ``exact_threshold`` (defaults
    to ``samples``), in which case it is enumerated exactly.

    One base seed is drawn from ``rng``; every sampled constraint then gets its
    own generator seeded from that base and the constraint's content key.
    """
    samples = resolve(samples, 'TIGHTNESS_SAMPLES')
    if samples < 1:
        raise FeatureError("Tightness needs at least one sample")
    exact_threshold = samples if exact_threshold is None else exact_threshold
    base = int(rng.integers(2 ** 32))

    def estimate(constraint):
        sequence = np.random.SeedSequence([base, *constraint_seed_key(constraint, instance)])
        return constraint_tightness(
            constraint, instance, np.random.default_rng(sequence), samples, exact_threshold,
        )

    return summary6(estimate(c) for c in instance.constraints)


def alldiff_features(instance: Instance) -> Summary6:
    """Size of the union of scope domains over arity, per alldifferent constraint."""
    ratios = []
    for constraint in instance.constraints:
        if constraint.kind != ConstraintKind.ALLDIFFERENT:
            continue
        union = set().union(*instance.scope_domains(constraint))
        ratios.append(len(union) / constraint.arity)
    return summary6(ratios)


@dataclass(frozen=True)
class FeatureVector:
    """Named attribute values of one instance in canonical order."""

    instance: str
    names: Tuple[str, ...]
    values: Tuple[float, ...]
    feature_set: FeatureSet
    extract_seconds: float = 0.0
    diagnostics: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'feature_set', FeatureSet(self.feature_set))
        object.__setattr__(self, 'names', tuple(self.names))
        object.__setattr__(self, 'values', tuple(float(v) for v in self.values))
        if self.names != self.feature_set.names:
            raise FeatureError(f"Feature names do not follow the canonical {self.feature_set.value} order")
        if len(self.values) != len(self.names):
            raise FeatureError(f"Expected {len(self.names)} values, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise FeatureError(f"Non-finite feature value for instance {self.instance}")

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def extract(instance: Instance, feature_set: Union[FeatureSet, str] = FeatureSet.FULL,
            rng: Union[np.random.Generator, int, None] = None,
            samples: Optional[int] = None) -> FeatureVector:
    """
    Compute the attribute vector of an instance.

    Args:
        instance: Parsed instance
        feature_set: ``full`` (37 attributes) or ``cheap`` (29, no expensive graph attributes)
        rng: Random generator or seed for tightness sampling (defaults to CSPSEL SEED)
        samples: Tightness sample budget per constraint

    Returns:
        FeatureVector with wall-clock extraction seconds (parsing excluded)
    """
    feature_set = FeatureSet(feature_set)
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(get_setting('SEED') if rng is None else rng)

    started = time.perf_counter()
    values: Dict[str, float] = {}
    diagnostics: List[str] = []

    graph = build_primal_graph(instance)
    values['edge_density'] = edge_density(graph)
    if feature_set is FeatureSet.FULL:
        values['clustering'] = clustering_coefficient(graph)
        degrees = degree_stats(graph)
        values.update({
            'deg_min': degrees.min,
            'deg_max': degrees.max,
            'deg_mean': degrees.mean,
            'deg_median': degrees.median,
            'deg_sd': degrees.sd,
            'width_ordering': width_of_ordering(graph, instance.ordering),
            'width_graph': width_of_graph(graph),
        })

    for prefix, summary in (
        ('dom', domain_features(instance)),
        ('arity', arity_features(instance)),
    ):
        values.update(zip(_stat_names(prefix), summary.as_tuple()))
        if summary.degenerate:
            diagnostics.append(f'{prefix}:empty')

    values['multi_shared'] = multiple_shared_variables(instance)
    values['con_per_var'] = mean_constraints_per_variable(instance)
    values['aux_ratio'] = aux_ratio(instance)
    if all(v.aux for v in instance.variables):
        diagnostics.append('aux_ratio:no_primary_variables')

    tightness = tightness_features(instance, rng, samples=samples)
    values.update(zip(_stat_names('tight'), tightness.as_tuple()))
    if tightness.degenerate:
        diagnostics.append('tight:empty')

    values['sym_prop'] = symmetry_proportion(instance)

    alldiff = alldiff_features(instance)
    values.update(zip(_stat_names('ad'), alldiff.as_tuple()))
    if alldiff.degenerate:
        diagnostics.append('ad:no_alldifferent')

    elapsed = time.perf_counter() - started
    if diagnostics:
        logger.debug(f"Degenerate statistics for {instance.name}: {', '.join(diagnostics)}")

    names = feature_set.names
    return FeatureVector(
        instance=instance.name,
        names=names,
        values=tuple(values[name] for name in names),
        feature_set=feature_set,
        extract_seconds=elapsed,
        diagnostics=tuple(diagnostics),
    )


def write_features_csv(vectors: Sequence[FeatureVector], stream) -> None:
    """Write vectors as CSV; all vectors must share one feature set."""
    if not vectors:
        raise FeatureFileError("No feature vectors to write")
    feature_set = vectors[0].feature_set
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['instance', *feature_set.names, 'extract_seconds'])
    for vector in vectors:
        if vector.feature_set is not feature_set:
            raise FeatureFileError("Cannot mix full and cheap vectors in one file")
        writer.writerow([
            vector.instance,
            *(format(v, '.17g') for v in vector.values),
            format(vector.extract_seconds, '.9g'),
        ])


def read_features_csv(text: str) -> List[FeatureVector]:
    """
    Parse a features CSV written by ``write_features_csv``.

    Raises:
        FeatureFileError: On unknown header, malformed rows or duplicate instances
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0] != 'instance' or header[-1] != 'extract_seconds':
        raise FeatureFileError("Features file must start with 'instance' and end with 'extract_seconds'")
    try:
        feature_set = FeatureSet.for_names(header[1:-1])
    except FeatureError as e:
        raise FeatureFileError(str(e)) from e

    vectors = []
    seen = set()
    for line_no, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(header):
            raise FeatureFileError(f"Line {line_no}: expected {len(header)} fields, got {len(row)}")
        name = row[0]
        if name in seen:
            raise FeatureFileError(f"Line {line_no}: duplicate instance {name!r}")
        seen.add(name)
        try:
            numbers = [float(v) for v in row[1:]]
            vectors.append(FeatureVector(
                instance=name,
                names=feature_set.names,
                values=tuple(numbers[:-1]),
                feature_set=feature_set,
                extract_seconds=numbers[-1],
            ))
        except (ValueError, FeatureError) as e:
            raise FeatureFileError(f"Line {line_no}: {e}") from e
    return vectors


def extract_file(path, feature_set: Union[FeatureSet, str] = FeatureSet.FULL, seed: Optional[int] = None,
                 samples: Optional[int] = None) -> FeatureVector:
    """Parse an instance file and extract it with a fresh generator seeded by ``seed``."""
    path = Path(path)
    instance = parse_instance(path.read_text(encoding='utf-8'), name=path.stem)
    return extract(instance, feature_set, rng=np.random.default_rng(resolve(seed, 'SEED')), samples=samples)


def vector_to_payload(vector: FeatureVector) -> dict:
    """JSON-serialisable form of a vector (used for task results)."""
    return {
        'instance': vector.instance,
        'feature_set': vector.feature_set.value,
        'values': list(vector.values),
        'extract_seconds': vector.extract_seconds,
        'diagnostics': list(vector.diagnostics),
    }


def vector_from_payload(payload: dict) -> FeatureVector:
    feature_set = FeatureSet(payload['feature_set'])
    return FeatureVector(
        instance=payload['instance'],
        names=feature_set.names,
        values=tuple(payload['values']),
        feature_set=feature_set,
        extract_seconds=payload.get('extract_seconds', 0.0),
        diagnostics=tuple(payload.get('diagnostics', ())),
    )
