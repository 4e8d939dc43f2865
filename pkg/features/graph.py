"""
Primal graph construction and the graph-based instance attributes.

Vertices are variable indices; two vertices are adjacent iff the variables
share a constraint scope. Every attribute is normalised and is 0 on graphs
with fewer than two vertices.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import networkx as nx
import numpy as np

from instances.domain import Instance


class GraphFeatureError(Exception):
    """Raised when a graph attribute is requested with invalid inputs."""
    pass


@dataclass(frozen=True, eq=False)
class PrimalGraph:
    """
    Undirected simple graph on ``n`` vertices.

    ``edges`` is an (m, 2) integer array of unique pairs with u < v, sorted
    lexicographically.
    """

    n: int
    edges: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(len(self.edges))

    def edge_set(self):
        return {(int(u), int(v)) for u, v in self.edges}

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges.tolist())
        return graph

    @classmethod
    def from_edges(cls, n: int, pairs) -> 'PrimalGraph':
        """Build from any iterable of vertex pairs; self-loops and repeats are dropped."""
        array = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(n=n, edges=_canonical_edges(n, array))


class DegreeStats(NamedTuple):
    min: float
    max: float
    mean: float
    median: float
    sd: float


def _canonical_edges(n: int, pairs: np.ndarray) -> np.ndarray:
    if len(pairs) == 0:
        return np.empty((0, 2), dtype=np.int64)
    u = np.minimum(pairs[:, 0], pairs[:, 1])
    v = np.maximum(pairs[:, 0], pairs[:, 1])
    keep = u != v
    codes = np.unique(u[keep] * max(n, 1) + v[keep])
    return np.column_stack((codes // max(n, 1), codes % max(n, 1))).astype(np.int64)


def build_primal_graph(instance: Instance) -> PrimalGraph:
    """Primal graph of an instance: one clique per constraint scope."""
    blocks = []
    for constraint in instance.constraints:
        scope = np.asarray(constraint.scope, dtype=np.int64)
        if len(scope) < 2:
            continue
        i, j = np.triu_indices(len(scope), k=1)
        blocks.append(np.column_stack((scope[i], scope[j])))
    pairs = np.concatenate(blocks) if blocks else np.empty((0, 2), dtype=np.int64)
    return PrimalGraph(n=instance.n_variables, edges=_canonical_edges(instance.n_variables, pairs))


def edge_density(graph: PrimalGraph) -> float:
    """Edges divided by the number of pairs of distinct vertices."""
    if graph.n < 2:
        return 0.0
    return graph.n_edges / (graph.n * (graph.n - 1) / 2)


def clustering_coefficient(graph: PrimalGraph) -> float:
    """Mean local edge density over all vertices; vertices of degree < 2 count as 0."""
    if graph.n < 2:
        return 0.0
    return float(nx.average_clustering(graph.nx_graph))


def degree_stats(graph: PrimalGraph) -> DegreeStats:
    """Min, max, mean and median normalised degree, and population sd of degree over n."""
    if graph.n == 0:
        return DegreeStats(0.0, 0.0, 0.0, 0.0, 0.0)
    normalised = graph.degrees / graph.n
    return DegreeStats(
        min=float(normalised.min()),
        max=float(normalised.max()),
        mean=float(normalised.mean()),
        median=float(np.median(normalised)),
        sd=float(np.std(graph.degrees) / graph.n),
    )


def width_of_ordering(graph: PrimalGraph, ordering: Sequence[int]) -> float:
    """Maximum number of earlier neighbours over all vertices, divided by n."""
    ordering = np.asarray(ordering, dtype=np.int64)
    if sorted(ordering.tolist()) != list(range(graph.n)):
        raise GraphFeatureError("Ordering is not a permutation of the graph's vertices")
    if graph.n < 2 or graph.n_edges == 0:
        return 0.0
    position = np.empty(graph.n, dtype=np.int64)
    position[ordering] = np.arange(graph.n)
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    later = np.where(position[u] > position[v], u, v)
    parents = np.bincount(later, minlength=graph.n)
    return float(parents.max() / graph.n)


def width_of_graph(graph: PrimalGraph) -> float:
    """
    Minimum ordering width over all orderings, divided by n.

    Equal to the graph degeneracy, i.e. the largest minimum degree met while
    repeatedly deleting a minimum-degree vertex, which is the maximum core
    number.
    """
    if graph.n < 2 or graph.n_edges == 0:
        return 0.0
    return float(max(nx.core_number(graph.nx_graph).values()) / graph.n)
