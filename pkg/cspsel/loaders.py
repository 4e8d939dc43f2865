"""
File loading for management commands.

Each loader turns the library's exceptions into a CommandError whose message
names the file and the failure class.
"""
from pathlib import Path

from django.core.management.base import CommandError

from features.services import FeatureFileError, read_features_csv
from performance.services import (
    RuntimeDataError,
    SolverSetError,
    parse_runtime_csv,
    parse_solvers_file,
    read_labels_csv,
)


def _read(path) -> str:
    path = Path(path)
    if not path.is_file():
        raise CommandError(f"File not found: {path}")
    return path.read_text(encoding='utf-8')


def load_features(path):
    try:
        vectors = read_features_csv(_read(path))
    except FeatureFileError as e:
        raise CommandError(f"Features file {path} does not match the features schema: {e}")
    if not vectors:
        raise CommandError(f"Features file {path} has no rows")
    return vectors


def load_solvers(path, timeout=None):
    text = _read(path)
    try:
        return parse_solvers_file(text, timeout_seconds=timeout)
    except SolverSetError as e:
        raise CommandError(f"Invalid solvers file {path}: {e}")


def load_runtime_data(runtimes, solvers_path, timeout=None):
    """Read a solvers file and a runtime CSV."""
    solvers = load_solvers(solvers_path, timeout)
    text = _read(runtimes)
    try:
        return solvers, parse_runtime_csv(text, solvers)
    except RuntimeDataError as e:
        raise CommandError(f"Invalid runtime file {runtimes}: {e}")


def load_labels(path, solvers):
    text = _read(path)
    try:
        return read_labels_csv(text, solvers)
    except RuntimeDataError as e:
        raise CommandError(f"Invalid labels file {path}: {e}")


def load_ensemble_file(path):
    from pipeline.persistence import (
        EnsembleCorruptionError,
        EnsembleFormatError,
        EnsembleVersionError,
        loads_ensemble,
    )

    text = _read(path)
    try:
        return loads_ensemble(text)
    except EnsembleVersionError as e:
        raise CommandError(f"Ensemble {path} has an unsupported version: {e}")
    except EnsembleCorruptionError as e:
        raise CommandError(f"Ensemble {path} is corrupt: {e}")
    except EnsembleFormatError as e:
        raise CommandError(f"Ensemble {path} is not an ensemble file: {e}")


def check_feature_schema(vectors, ensemble, path):
    names = vectors[0].names
    if tuple(names) != tuple(ensemble.feature_names):
        raise CommandError(
            f"Features file {path} has {len(names)} columns ({vectors[0].feature_set.value}) "
            f"but the ensemble was trained on {len(ensemble.feature_names)}"
        )
