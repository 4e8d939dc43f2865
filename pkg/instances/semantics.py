"""
Tuple-satisfaction semantics for constraints and domain-valid tuple sampling.
"""
import itertools
import operator
from typing import Optional, Sequence, Tuple

import numpy as np

from .domain import Constraint, ConstraintError, ConstraintKind, Instance

_PY_OPS = {
    '=': operator.eq,
    '!=': operator.ne,
    '<': operator.lt,
    '<=': operator.le,
    '>': operator.gt,
    '>=': operator.ge,
}

_NP_OPS = {
    '=': np.equal,
    '!=': np.not_equal,
    '<': np.less,
    '<=': np.less_equal,
    '>': np.greater,
    '>=': np.greater_equal,
}


def satisfies(constraint: Constraint, assignment: Sequence[int], instance: Optional[Instance] = None) -> bool:
    """
    Test whether an assignment to the constraint's scope satisfies it.

    Args:
        constraint: The constraint to test
        assignment: One value per scope position
        instance: When given, values are checked against the scope domains

    Raises:
        ConstraintError: On arity mismatch or a value outside its domain
    """
    values = tuple(int(v) for v in assignment)
    if len(values) != constraint.arity:
        raise ConstraintError(
            f"Assignment of length {len(values)} does not match arity {constraint.arity}"
        )
    if instance is not None:
        for position, (value, domain) in enumerate(zip(values, instance.scope_domains(constraint))):
            if value not in domain:
                raise ConstraintError(f"Value {value} at position {position} is outside its domain")

    if constraint.kind == ConstraintKind.ALLDIFFERENT:
        return len(set(values)) == len(values)
    if constraint.kind == ConstraintKind.EXTENSION:
        member = values in constraint.tuples
        return member if constraint.allowed else not member
    x, y = values
    return _PY_OPS[constraint.op](x, y + constraint.offset)


def sample_valid_tuple(constraint: Constraint, instance: Instance, rng: np.random.Generator) -> Tuple[int, ...]:
    """Draw each scope position independently and uniformly from its domain."""
    return tuple(
        int(domain[rng.integers(len(domain))])
        for domain in instance.scope_domains(constraint)
    )


def sample_valid_tuples(constraint: Constraint, instance: Instance, rng: np.random.Generator, count: int) -> np.ndarray:
    """
    Draw ``count`` domain-valid tuples at once.

    Returns an integer array of shape (count, arity); column j holds independent
    uniform draws from the domain of scope position j.
    """
    columns = [
        np.asarray(domain, dtype=np.int64)[rng.integers(len(domain), size=count)]
        for domain in instance.scope_domains(constraint)
    ]
    return np.column_stack(columns) if columns else np.empty((count, 0), dtype=np.int64)


def enumerate_tuples(constraint: Constraint, instance: Instance) -> np.ndarray:
    """Every tuple of the scope's domain product, as an array of shape (product, arity)."""
    rows = list(itertools.product(*instance.scope_domains(constraint)))
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), constraint.arity)


def count_violations(constraint: Constraint, tuples: np.ndarray) -> int:
    """Number of rows of ``tuples`` that do not satisfy the constraint."""
    tuples = np.asarray(tuples, dtype=np.int64)
    if tuples.ndim != 2 or tuples.shape[1] != constraint.arity:
        raise ConstraintError(
            f"Tuple array of shape {tuples.shape} does not match arity {constraint.arity}"
        )
    if len(tuples) == 0:
        return 0

    if constraint.kind == ConstraintKind.ALLDIFFERENT:
        ordered = np.sort(tuples, axis=1)
        return int((np.diff(ordered, axis=1) == 0).any(axis=1).sum())
    if constraint.kind == ConstraintKind.RELATION:
        ok = _NP_OPS[constraint.op](tuples[:, 0], tuples[:, 1] + constraint.offset)
        return int((~ok).sum())

    member = np.fromiter(
        (tuple(row) in constraint.tuples for row in tuples.tolist()),
        dtype=bool,
        count=len(tuples),
    )
    ok = member if constraint.allowed else ~member
    return int((~ok).sum())
