"""
Gaussian naive Bayes.
"""
import math
from typing import Optional

import numpy as np

from cspsel.conf import resolve

from .base import LearnerError, Model, TrainingSet


class NaiveBayesModel(Model):
    """
    Per-class log prior plus independent Gaussian log densities per feature.

    Classes absent from training keep a prior of ``-inf`` and are never predicted.
    """

    kind = 'nbayes'

    def __init__(self, n_features, alphabet, log_prior, means, variances):
        super().__init__(n_features, alphabet)
        self.log_prior = np.asarray(log_prior, dtype=float)
        self.means = np.asarray(means, dtype=float).reshape(len(self.alphabet), self.n_features)
        self.variances = np.asarray(variances, dtype=float).reshape(len(self.alphabet), self.n_features)

    def scores(self, x: np.ndarray) -> np.ndarray:
        present = np.isfinite(self.log_prior)
        scores = np.full(len(self.alphabet), -np.inf)
        means, variances = self.means[present], self.variances[present]
        log_density = -0.5 * (np.log(2.0 * math.pi * variances) + (x - means) ** 2 / variances)
        scores[present] = self.log_prior[present] + log_density.sum(axis=1)
        return scores

    def _predict_index(self, x):
        return int(np.argmax(self.scores(x)))

    def _params(self):
        # JSON has no infinity; absent classes are stored as null
        return {
            'log_prior': [float(p) if math.isfinite(p) else None for p in self.log_prior],
            'means': self.means.tolist(),
            'variances': self.variances.tolist(),
        }

    @classmethod
    def _from_params(cls, n_features, alphabet, params):
        log_prior = [-math.inf if p is None else p for p in params['log_prior']]
        return cls(n_features, alphabet, log_prior, params['means'], params['variances'])


def train_naive_bayes(ts: TrainingSet, var_floor: Optional[float] = None) -> NaiveBayesModel:
    """
    Add-one smoothed priors and per-class Gaussian features.

    Variances are population variances floored at ``var_floor``.
    """
    ts.require_rows('nbayes')
    var_floor = resolve(var_floor, 'NB_VAR_FLOOR')
    if not var_floor > 0:
        raise LearnerError("Naive Bayes variance floor must be positive")
    n_classes = len(ts.alphabet)
    codes = ts.codes
    counts = ts.class_counts()

    log_prior = np.full(n_classes, -np.inf)
    means = np.zeros((n_classes, ts.n_features))
    variances = np.full((n_classes, ts.n_features), var_floor)
    for c in np.flatnonzero(counts):
        rows = ts.features[codes == c]
        log_prior[c] = math.log((counts[c] + 1) / (ts.n_rows + n_classes))
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), var_floor)
    return NaiveBayesModel(ts.n_features, ts.alphabet, log_prior, means, variances)
