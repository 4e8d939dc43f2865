"""
Proportion of symmetric variables via colour refinement.

The instance is encoded as a coloured bipartite graph (variables on one side,
constraints on the other); refinement runs to a fixpoint and the colour
classes of the variable vertices form the partition.
"""
import hashlib
import itertools
import json
import logging
from math import comb
from typing import Dict, List, Tuple

from cspsel.conf import resolve
from instances.domain import Constraint, ConstraintKind, Instance

logger = logging.getLogger(__name__)

_SYMMETRIC_RELATIONS = {'=', '!='}


def tuple_set_digest(constraint: Constraint) -> str:
    """Stable SHA256 over the sorted tuple set of an extension constraint."""
    payload = json.dumps(sorted(list(t) for t in constraint.tuples))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def position_labels(constraint: Constraint, max_arity: int) -> Tuple[int, ...]:
    """
    Edge label per scope position; interchangeable positions share a label.

    Positions are interchangeable when some permutation of positions that maps
    one onto the other leaves the constraint's tuple set unchanged.
    """
    arity = constraint.arity
    if constraint.kind == ConstraintKind.ALLDIFFERENT:
        return (0,) * arity
    if constraint.kind == ConstraintKind.RELATION:
        if constraint.op in _SYMMETRIC_RELATIONS and constraint.offset == 0:
            return (0, 0)
        return (0, 1)
    if arity > max_arity:
        return tuple(range(arity))

    # Union-find over positions, joined by every symmetry of the tuple set
    parent = list(range(arity))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for perm in itertools.permutations(range(arity)):
        if perm == tuple(range(arity)):
            continue
        permuted = {tuple(t[p] for p in perm) for t in constraint.tuples}
        if permuted != constraint.tuples:
            continue
        for i, j in enumerate(perm):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return tuple(find(i) for i in range(arity))


_MIRRORED_RELATIONS = {'>': '<', '>=': '<='}


def _constraint_colour(constraint: Constraint) -> tuple:
    if constraint.kind == ConstraintKind.ALLDIFFERENT:
        return ('con', 'alldifferent', constraint.arity)
    if constraint.kind == ConstraintKind.RELATION:
        if constraint.op in _MIRRORED_RELATIONS:
            # x > y + c reads as y < x - c
            return ('con', 'relation', _MIRRORED_RELATIONS[constraint.op], -constraint.offset)
        return ('con', 'relation', constraint.op, constraint.offset)
    return ('con', 'extension', constraint.allowed, constraint.arity, tuple_set_digest(constraint))


def _oriented_labels(constraint: Constraint, max_arity: int) -> Tuple[int, ...]:
    labels = position_labels(constraint, max_arity)
    if constraint.kind == ConstraintKind.RELATION and constraint.op in _MIRRORED_RELATIONS:
        return labels[::-1]
    return labels


def refine_partition(instance: Instance, max_arity: int = None) -> List[List[int]]:
    """
    Colour classes of the variables after refinement reaches a fixpoint.

    Classes are returned as sorted lists of variable indices, ordered by their
    smallest member.
    """
    max_arity = resolve(max_arity, 'SYMMETRY_MAX_ARITY')
    n_vars = instance.n_variables

    # Adjacency with edge labels; constraint vertices are numbered after variables
    neighbours: List[List[Tuple[int, int]]] = [[] for _ in range(n_vars + instance.n_constraints)]
    initial = []
    for variable in instance.variables:
        initial.append(('var', variable.domain, variable.aux))
    for c_index, constraint in enumerate(instance.constraints):
        vertex = n_vars + c_index
        initial.append(_constraint_colour(constraint))
        for var_index, label in zip(constraint.scope, _oriented_labels(constraint, max_arity)):
            neighbours[vertex].append((label, var_index))
            neighbours[var_index].append((label, vertex))

    colours = _relabel(initial)
    n_classes = len(set(colours))
    rounds = 0
    while True:
        rounds += 1
        signatures = [
            (colours[v], tuple(sorted((label, colours[u]) for label, u in neighbours[v])))
            for v in range(len(colours))
        ]
        refined = _relabel(signatures)
        refined_classes = len(set(refined))
        colours = refined
        if refined_classes == n_classes:
            break
        n_classes = refined_classes
    logger.debug(f"Colour refinement on {instance.name} stable after {rounds} rounds")

    classes: Dict[int, List[int]] = {}
    for v in range(n_vars):
        classes.setdefault(colours[v], []).append(v)
    return sorted(classes.values(), key=lambda members: members[0])


def _relabel(keys: list) -> List[int]:
    """Map hashable keys to dense integer colours in order of first appearance."""
    palette: Dict[object, int] = {}
    return [palette.setdefault(key, len(palette)) for key in keys]


def symmetry_proportion(instance: Instance, max_arity: int = None) -> float:
    """Share of variable pairs that fall in the same refinement class."""
    n_vars = instance.n_variables
    if n_vars < 2:
        return 0.0
    partition = refine_partition(instance, max_arity=max_arity)
    same = sum(comb(len(members), 2) for members in partition)
    return same / comb(n_vars, 2)
