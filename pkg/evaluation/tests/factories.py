"""
Test factories for evaluation app.
"""
import numpy as np

from features.services import CHEAP_FEATURES, FeatureVector


def blank_vectors(instances, extract_seconds=0.0):
    """Cheap vectors of zeros for choosers that only look at the instance name."""
    zeros = np.zeros(len(CHEAP_FEATURES))
    return [
        FeatureVector(name, CHEAP_FEATURES, zeros, 'cheap', extract_seconds=extract_seconds)
        for name in instances
    ]
