"""
Rule learners: majority class (ZeroR) and single-feature rules (OneR).
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cspsel.conf import resolve

from .base import ConstantModel, LearnerError, Model, TrainingSet

logger = logging.getLogger(__name__)


class ZeroRModel(ConstantModel):
    kind = 'zeror'


def train_zero_r(ts: TrainingSet) -> ZeroRModel:
    """Predict the most frequent training class, ties to alphabet order."""
    ts.require_rows('zeror')
    return ZeroRModel(ts.n_features, ts.alphabet, ts.majority_index())


class OneRModel(Model):
    """
    Rule on a single feature: sorted thresholds split the axis into buckets,
    each predicting one class. A value equal to a threshold falls left.
    """

    kind = 'oner'

    def __init__(self, n_features, alphabet, feature: int, thresholds: Sequence[float],
                 bucket_labels: Sequence[int], accuracy: float = 0.0):
        super().__init__(n_features, alphabet)
        if len(bucket_labels) != len(thresholds) + 1:
            raise LearnerError("OneR needs one more bucket than thresholds")
        self.feature = int(feature)
        self.thresholds = np.asarray(thresholds, dtype=float)
        self.bucket_labels = np.asarray(bucket_labels, dtype=np.int64)
        self.accuracy = float(accuracy)

    def _predict_index(self, x):
        if not len(self.thresholds):
            return int(self.bucket_labels[0])
        bucket = int(np.searchsorted(self.thresholds, x[self.feature], side='left'))
        return int(self.bucket_labels[bucket])

    def _params(self):
        return {
            'feature': self.feature,
            'thresholds': self.thresholds.tolist(),
            'bucket_labels': self.bucket_labels.tolist(),
            'accuracy': self.accuracy,
        }

    @classmethod
    def _from_params(cls, n_features, alphabet, params):
        return cls(n_features, alphabet, params['feature'], params['thresholds'],
                   params['bucket_labels'], params.get('accuracy', 0.0))


def _feature_rule(values: np.ndarray, codes: np.ndarray, n_classes: int,
                  min_bucket: int) -> Tuple[List[float], List[int], int]:
    """
    Discretise one feature and return (thresholds, bucket classes, correct count).

    A bucket closes once its majority class has ``min_bucket`` members and the
    next value differs and belongs to another class, so equal values never
    straddle a boundary. Adjacent buckets with the same majority are merged.
    """
    order = np.argsort(values, kind='stable')
    v, y = values[order], codes[order]
    n = len(v)

    buckets = []  # (first, last, counts)
    start, i = 0, 0
    counts = np.zeros(n_classes, dtype=np.int64)
    while i < n:
        counts[y[i]] += 1
        i += 1
        majority = int(np.argmax(counts))
        if counts[majority] < min_bucket:
            continue
        while i < n and (y[i] == majority or v[i] == v[i - 1]):
            counts[y[i]] += 1
            i += 1
        buckets.append((start, i - 1, counts))
        start, counts = i, np.zeros(n_classes, dtype=np.int64)
    if start < n:
        buckets.append((start, n - 1, counts))

    merged = []
    for first, last, bucket_counts in buckets:
        label = int(np.argmax(bucket_counts))
        if merged and merged[-1][2] == label:
            prev_first, _, _, prev_counts = merged[-1]
            merged[-1] = (prev_first, last, label, prev_counts + bucket_counts)
        else:
            merged.append((first, last, label, bucket_counts))

    thresholds = []
    for (_, last, _, _), (first, _, _, _) in zip(merged, merged[1:]):
        low, high = v[last], v[first]
        midpoint = (low + high) / 2.0
        thresholds.append(float(midpoint if midpoint < high else low))
    labels = [label for _, _, label, _ in merged]
    correct = int(sum(bucket_counts[label] for _, _, label, bucket_counts in merged))
    return thresholds, labels, correct


def train_one_r(ts: TrainingSet, min_bucket: Optional[int] = None) -> OneRModel:
    """Best single-feature rule by training accuracy; ties to the lower feature index."""
    ts.require_rows('oner')
    min_bucket = resolve(min_bucket, 'ONER_MIN_BUCKET')
    if min_bucket < 1:
        raise LearnerError("OneR min_bucket must be at least 1")
    codes = ts.codes
    if ts.n_features == 0:
        return OneRModel(0, ts.alphabet, 0, [], [ts.majority_index()])

    best = None
    for feature in range(ts.n_features):
        thresholds, labels, correct = _feature_rule(ts.features[:, feature], codes, len(ts.alphabet), min_bucket)
        if best is None or correct > best[3]:
            best = (feature, thresholds, labels, correct)
    feature, thresholds, labels, correct = best
    logger.debug(f"OneR chose feature {feature} with {len(labels)} buckets, {correct}/{ts.n_rows} correct")
    return OneRModel(ts.n_features, ts.alphabet, feature, thresholds, labels, correct / ts.n_rows)
