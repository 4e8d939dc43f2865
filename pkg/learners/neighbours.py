"""
k-nearest neighbours on z-score normalised features.
"""
from typing import Optional

import numpy as np

from cspsel.conf import resolve

from .base import LearnerError, Model, TrainingSet

# Relative slack when collecting neighbours tied at the k-th distance
_TIE_TOLERANCE = 1e-9


class KNNModel(Model):
    kind = 'knn'

    def __init__(self, n_features, alphabet, k, mean, scale, rows, codes):
        super().__init__(n_features, alphabet)
        self.k = int(k)
        self.mean = np.asarray(mean, dtype=float)
        self.scale = np.asarray(scale, dtype=float)
        self.rows = np.asarray(rows, dtype=float).reshape(-1, self.n_features)
        self.codes = np.asarray(codes, dtype=np.int64)

    def normalise(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) * self.scale

    def _predict_index(self, x):
        distances = ((self.rows - self.normalise(x)) ** 2).sum(axis=1)
        k = min(self.k, len(distances))
        kth = np.partition(distances, k - 1)[k - 1]
        neighbours = distances <= kth + _TIE_TOLERANCE * max(1.0, kth)
        votes = np.bincount(self.codes[neighbours], minlength=len(self.alphabet))
        return int(np.argmax(votes))

    def _params(self):
        return {
            'k': self.k,
            'mean': self.mean.tolist(),
            'scale': self.scale.tolist(),
            'rows': self.rows.tolist(),
            'codes': self.codes.tolist(),
        }

    @classmethod
    def _from_params(cls, n_features, alphabet, params):
        return cls(n_features, alphabet, params['k'], params['mean'], params['scale'],
                   params['rows'], params['codes'])


def train_knn(ts: TrainingSet, k: Optional[int] = None) -> KNNModel:
    """
    Store the normalised training rows.

    Each feature is centred on its mean and divided by its population standard
    deviation; a constant feature gets scale 0 and adds nothing to distances.
    """
    ts.require_rows('knn')
    k = resolve(k, 'KNN_K')
    if k < 1:
        raise LearnerError("kNN needs k >= 1")
    mean = ts.features.mean(axis=0)
    sd = ts.features.std(axis=0)
    scale = np.zeros_like(sd)
    np.divide(1.0, sd, out=scale, where=sd > 0)
    rows = (ts.features - mean) * scale
    return KNNModel(ts.n_features, ts.alphabet, k, mean, scale, rows, ts.codes)
