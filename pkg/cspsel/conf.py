"""
Access to the CSPSEL settings dict with built-in fallbacks.
"""
from django.conf import settings

DEFAULTS = {
    'TIMEOUT_SECONDS': 3600.0,
    'TIGHTNESS_SAMPLES': 1000,
    'SYMMETRY_MAX_ARITY': 4,
    'NODES_CPU_FLOOR': 1e-3,
    'FOLDS': 3,
    'SEED': 0,
    'LEARNERS': ['zeror', 'oner', 'nbayes', 'knn', 'tree'],
    'ONER_MIN_BUCKET': 6,
    'NB_VAR_FLOOR': 1e-9,
    'KNN_K': 5,
    'TREE_MAX_DEPTH': 20,
    'TREE_MIN_LEAF': 2,
}


def get_setting(name):
    """Return a CSPSEL setting, falling back to the built-in default."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown CSPSEL setting: {name}")
    configured = getattr(settings, 'CSPSEL', None) or {}
    return configured.get(name, DEFAULTS[name])


def resolve(value, name):
    """Use value when given, otherwise the configured setting."""
    return get_setting(name) if value is None else value
