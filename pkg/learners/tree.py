"""
Unpruned binary decision tree on numeric thresholds.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from cspsel.conf import resolve

from .base import LearnerError, Model, TrainingSet

logger = logging.getLogger(__name__)

_GAIN_EPSILON = 1e-12


def entropy(counts: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits of class-count rows (last axis)."""
    counts = np.asarray(counts, dtype=float)
    totals = counts.sum(axis=-1, keepdims=True)
    p = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    logs = np.log2(p, out=np.zeros_like(p), where=p > 0)
    return -(p * logs).sum(axis=-1)


@dataclass(frozen=True)
class Split:
    gain: float
    feature: int
    threshold: float
    left: np.ndarray
    right: np.ndarray


def best_split(features: np.ndarray, codes: np.ndarray, rows: np.ndarray, n_classes: int,
               min_leaf: int) -> Optional[Split]:
    """
    Highest information-gain split of ``rows`` with both sides >= ``min_leaf``.

    Candidate thresholds are midpoints between consecutive distinct values;
    rows with value <= threshold go left. Ties go to the lower feature, then
    the lower threshold. Returns None when no candidate exists.
    """
    n = len(rows)
    if n < 2 * min_leaf:
        return None
    labels = codes[rows]
    parent = entropy(np.bincount(labels, minlength=n_classes))
    best = None
    for feature in range(features.shape[1]):
        values = features[rows, feature]
        order = np.argsort(values, kind='stable')
        v = values[order]
        cumulative = np.cumsum(np.eye(n_classes, dtype=np.int64)[labels[order]], axis=0)
        # position i splits after sorted row i
        positions = np.arange(min_leaf - 1, n - min_leaf)
        positions = positions[v[positions] < v[positions + 1]]
        if not len(positions):
            continue
        left_counts = cumulative[positions]
        right_counts = cumulative[-1] - left_counts
        n_left = positions + 1
        weighted = (n_left * entropy(left_counts) + (n - n_left) * entropy(right_counts)) / n
        gains = parent - weighted
        top = gains.max()
        pick = int(np.flatnonzero(gains >= top - _GAIN_EPSILON)[0])
        if best is not None and top <= best[0] + _GAIN_EPSILON:
            continue
        i = positions[pick]
        low, high = v[i], v[i + 1]
        threshold = (low + high) / 2.0
        if not threshold < high:
            threshold = low
        best = (float(gains[pick]), feature, float(threshold))
    if best is None:
        return None
    gain, feature, threshold = best
    goes_left = features[rows, feature] <= threshold
    return Split(gain, feature, threshold, rows[goes_left], rows[~goes_left])


def _lookahead_split(features, codes, rows, n_classes, min_leaf) -> Optional[Split]:
    """
    Split whose best follow-up splits give positive combined gain.

    Used when no single split has positive gain (XOR-like layouts); the
    returned gain is the two-level gain, so accepted splits still have gain > 0.
    """
    n = len(rows)
    parent = entropy(np.bincount(codes[rows], minlength=n_classes))
    best = None
    for feature in range(features.shape[1]):
        values = features[rows, feature]
        distinct = np.unique(values)
        for low, high in zip(distinct, distinct[1:]):
            threshold = (low + high) / 2.0
            if not threshold < high:
                threshold = low
            goes_left = values <= threshold
            left, right = rows[goes_left], rows[~goes_left]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            remaining = 0.0
            for child in (left, right):
                follow = best_split(features, codes, child, n_classes, min_leaf)
                if follow is not None and follow.gain > _GAIN_EPSILON:
                    remaining += len(child) / n * (entropy(np.bincount(codes[child], minlength=n_classes)) - follow.gain)
                else:
                    remaining += len(child) / n * entropy(np.bincount(codes[child], minlength=n_classes))
            gain = float(parent - remaining)
            if gain > _GAIN_EPSILON and (best is None or gain > best.gain + _GAIN_EPSILON):
                best = Split(gain, feature, float(threshold), left, right)
    return best


class DecisionTreeModel(Model):
    """
    Tree stored as parallel node arrays; node 0 is the root, leaves have
    feature -1.
    """

    kind = 'tree'

    def __init__(self, n_features, alphabet, feature, threshold, left, right, value, gain):
        super().__init__(n_features, alphabet)
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.int64)
        self.gain = np.asarray(gain, dtype=float)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    @property
    def depth(self) -> int:
        def walk(node):
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))
        return walk(0)

    def _predict_index(self, x):
        node = 0
        while self.feature[node] >= 0:
            node = self.left[node] if x[self.feature[node]] <= self.threshold[node] else self.right[node]
        return int(self.value[node])

    def _params(self):
        return {
            'feature': self.feature.tolist(),
            'threshold': self.threshold.tolist(),
            'left': self.left.tolist(),
            'right': self.right.tolist(),
            'value': self.value.tolist(),
            'gain': self.gain.tolist(),
        }

    @classmethod
    def _from_params(cls, n_features, alphabet, params):
        return cls(n_features, alphabet, params['feature'], params['threshold'], params['left'],
                   params['right'], params['value'], params['gain'])


class _TreeBuilder:
    def __init__(self, ts: TrainingSet, max_depth: int, min_leaf: int):
        self.features = ts.features
        self.codes = ts.codes
        self.n_classes = len(ts.alphabet)
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.nodes: List[list] = []  # [feature, threshold, left, right, value, gain]

    def grow(self, rows: np.ndarray, depth: int) -> int:
        node = len(self.nodes)
        counts = np.bincount(self.codes[rows], minlength=self.n_classes)
        self.nodes.append([-1, 0.0, -1, -1, int(np.argmax(counts)), 0.0])
        if np.count_nonzero(counts) <= 1 or depth >= self.max_depth:
            return node

        split = best_split(self.features, self.codes, rows, self.n_classes, self.min_leaf)
        if (split is None or split.gain <= _GAIN_EPSILON) and depth + 2 <= self.max_depth:
            split = _lookahead_split(self.features, self.codes, rows, self.n_classes, self.min_leaf)
        if split is None or split.gain <= _GAIN_EPSILON:
            return node

        left = self.grow(split.left, depth + 1)
        right = self.grow(split.right, depth + 1)
        self.nodes[node][:4] = [split.feature, split.threshold, left, right]
        self.nodes[node][5] = split.gain
        return node


def train_decision_tree(ts: TrainingSet, max_depth: Optional[int] = None,
                        min_leaf: Optional[int] = None) -> DecisionTreeModel:
    """
    Grow a tree by maximum information gain (entropy in bits).

    Growth stops at pure nodes, at ``max_depth``, when every candidate would
    leave a child under ``min_leaf`` rows, or when no split (or pair of
    nested splits) gains information. Leaves predict their majority class.
    """
    ts.require_rows('tree')
    max_depth = resolve(max_depth, 'TREE_MAX_DEPTH')
    min_leaf = resolve(min_leaf, 'TREE_MIN_LEAF')
    if max_depth < 0 or min_leaf < 1:
        raise LearnerError("Tree needs max_depth >= 0 and min_leaf >= 1")
    builder = _TreeBuilder(ts, max_depth, min_leaf)
    builder.grow(np.arange(ts.n_rows), 0)
    columns = list(zip(*builder.nodes))
    model = DecisionTreeModel(ts.n_features, ts.alphabet, *columns)
    logger.debug(f"Tree grown with {model.n_nodes} nodes, depth {model.depth}")
    return model
