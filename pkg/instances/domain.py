"""
CSP instance data model: variables, constraints and instances.

All objects are immutable once constructed and validate their invariants in
``__post_init__``.
"""
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Tuple


class InstanceError(Exception):
    """Base exception for instance model errors."""
    pass


class InstanceValidationError(InstanceError):
    """Raised when an instance, variable or constraint breaks an invariant."""
    pass


class ConstraintError(InstanceError):
    """Raised when a constraint is evaluated on an unsuitable assignment."""
    pass


class ConstraintKind(str, Enum):
    ALLDIFFERENT = 'alldifferent'
    EXTENSION = 'extension'
    RELATION = 'relation'


RELATION_OPS = ('=', '!=', '<', '<=', '>', '>=')


@dataclass(frozen=True)
class Variable:
    """A decision variable with a finite integer domain."""

    name: str
    domain: Tuple[int, ...]
    aux: bool = False

    def __post_init__(self):
        if not self.domain:
            raise InstanceValidationError(f"Variable {self.name} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise InstanceValidationError(f"Variable {self.name} has duplicate domain values")
        # Canonical form: sorted ascending
        object.__setattr__(self, 'domain', tuple(sorted(int(v) for v in self.domain)))

    @property
    def size(self) -> int:
        return len(self.domain)


@dataclass(frozen=True)
class Constraint:
    """
    A constraint over an ordered scope of variable indices.

    ``allowed`` and ``tuples`` are only meaningful for extension constraints;
    ``op`` and ``offset`` only for binary relations ``x op (y + offset)``.
    """

    kind: ConstraintKind
    scope: Tuple[int, ...]
    tuples: FrozenSet[Tuple[int, ...]] = field(default_factory=frozenset)
    allowed: bool = True
    op: Optional[str] = None
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'kind', ConstraintKind(self.kind))
        object.__setattr__(self, 'scope', tuple(int(i) for i in self.scope))
        object.__setattr__(self, 'tuples', frozenset(tuple(int(v) for v in t) for t in self.tuples))

        if self.arity < 1:
            raise InstanceValidationError("Constraint arity must be at least 1")
        if len(set(self.scope)) != len(self.scope):
            raise InstanceValidationError(f"Constraint scope repeats a variable: {self.scope}")

        if self.kind == ConstraintKind.ALLDIFFERENT:
            if self.arity < 2:
                raise InstanceValidationError(
                    f"alldifferent needs arity >= 2, got {self.arity}"
                )
        elif self.kind == ConstraintKind.RELATION:
            if self.arity != 2:
                raise InstanceValidationError(f"Relation constraints are binary, got arity {self.arity}")
            if self.op not in RELATION_OPS:
                raise InstanceValidationError(f"Unknown relation operator: {self.op!r}")
        elif self.kind == ConstraintKind.EXTENSION:
            bad = [t for t in self.tuples if len(t) != self.arity]
            if bad:
                raise InstanceValidationError(
                    f"Extension tuple {bad[0]} does not match arity {self.arity}"
                )

    @property
    def arity(self) -> int:
        return len(self.scope)


@dataclass(frozen=True)
class Instance:
    """A named CSP instance with an associated variable ordering."""

    name: str
    variables: Tuple[Variable, ...]
    constraints: Tuple[Constraint, ...] = ()
    ordering: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(self, 'constraints', tuple(self.constraints))

        duplicates = [name for name, count in Counter(v.name for v in self.variables).items() if count > 1]
        if duplicates:
            duplicate = duplicates[0]
            raise InstanceValidationError(f"Duplicate variable name: {duplicate}")

        n = len(self.variables)
        for constraint in self.constraints:
            out_of_range = [i for i in constraint.scope if not 0 <= i < n]
            if out_of_range:
                raise InstanceValidationError(
                    f"Constraint scope references undeclared variable index {out_of_range[0]}"
                )

        if self.ordering is None:
            object.__setattr__(self, 'ordering', tuple(range(n)))
        else:
            ordering = tuple(int(i) for i in self.ordering)
            if sorted(ordering) != list(range(n)):
                raise InstanceValidationError("Variable ordering is not a permutation of all variables")
            object.__setattr__(self, 'ordering', ordering)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def index_of(self, name: str) -> int:
        for i, variable in enumerate(self.variables):
            if variable.name == name:
                return i
        raise KeyError(name)

    def scope_domains(self, constraint: Constraint) -> Tuple[Tuple[int, ...], ...]:
        """Domains of the constraint's scope variables, in scope order."""
        return tuple(self.variables[i].domain for i in constraint.scope)
