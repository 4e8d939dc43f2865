"""
Ensemble file format.

A text file of three lines: the header ``cspsel-ensemble v1``, the ensemble as
one line of key-sorted JSON, and a ``sha256 <hex>`` trailer over that JSON line.
"""
import hashlib
import json
import logging

from learners.base import LearnerError
from performance.services import SolverSet, SolverSetError

from .services import Ensemble, EnsembleMember, HierarchicalModel, PipelineError

logger = logging.getLogger(__name__)

MAGIC = 'cspsel-ensemble'
VERSION = 'v1'


class EnsembleFormatError(PipelineError):
    """Raised when an ensemble file cannot be read."""
    pass


class EnsembleVersionError(EnsembleFormatError):
    """Raised when an ensemble file has an unsupported format version."""
    pass


class EnsembleCorruptionError(EnsembleFormatError):
    """Raised when an ensemble file is truncated or fails its checksum."""
    pass


def ensemble_to_dict(ensemble: Ensemble) -> dict:
    return {
        'solvers': ensemble.solvers.to_dict(),
        'feature_names': list(ensemble.feature_names),
        'feature_count': len(ensemble.feature_names),
        'learners': list(ensemble.learners),
        'params': ensemble.params,
        'k': ensemble.k,
        'duplicate': ensemble.duplicate,
        'strict_folds': ensemble.strict_folds,
        'seed': ensemble.seed,
        'members': [
            {'fold': m.fold, **m.model.to_dict()}
            for m in ensemble.members
        ],
    }


def ensemble_from_dict(data: dict) -> Ensemble:
    solvers = SolverSet.from_dict(data['solvers'])
    if data.get('feature_count', len(data['feature_names'])) != len(data['feature_names']):
        raise PipelineError("Feature count does not match the feature names")
    members = [
        EnsembleMember(m['learner'], m['fold'], HierarchicalModel.from_dict(m, solvers))
        for m in data['members']
    ]
    return Ensemble(
        solvers=solvers,
        feature_names=tuple(data['feature_names']),
        learners=tuple(data['learners']),
        k=data['k'],
        members=members,
        params=data.get('params', {}),
        duplicate=data.get('duplicate', True),
        strict_folds=data.get('strict_folds', False),
        seed=data.get('seed'),
    )


def dumps_ensemble(ensemble: Ensemble) -> str:
    body = json.dumps(ensemble_to_dict(ensemble), sort_keys=True, separators=(',', ':'), allow_nan=False)
    digest = hashlib.sha256(body.encode('utf-8')).hexdigest()
    return f'{MAGIC} {VERSION}\n{body}\nsha256 {digest}\n'


def loads_ensemble(text: str) -> Ensemble:
    """
    Parse an ensemble file.

    Raises:
        EnsembleVersionError: Unsupported version line
        EnsembleCorruptionError: Missing lines, checksum mismatch or unreadable body
        EnsembleFormatError: Not an ensemble file
    """
    if '\n' not in text and f'{MAGIC} {VERSION}'.startswith(text):
        raise EnsembleCorruptionError("Ensemble file is truncated inside the header line")
    lines = text.split('\n')
    header = lines[0].split(' ')
    if len(header) != 2 or header[0] != MAGIC:
        raise EnsembleFormatError(f"Not an ensemble file (expected a '{MAGIC} {VERSION}' header)")
    if header[1] != VERSION:
        raise EnsembleVersionError(f"Unsupported ensemble version {header[1]!r}; this build reads {VERSION}")
    if len(lines) < 3 or not lines[2].startswith('sha256 '):
        raise EnsembleCorruptionError("Ensemble file is truncated (checksum trailer missing)")
    body, expected = lines[1], lines[2][len('sha256 '):].strip()
    if hashlib.sha256(body.encode('utf-8')).hexdigest() != expected:
        raise EnsembleCorruptionError("Ensemble checksum mismatch")
    try:
        return ensemble_from_dict(json.loads(body))
    except (ValueError, KeyError, TypeError, LearnerError, SolverSetError, PipelineError) as e:
        raise EnsembleCorruptionError(f"Ensemble body is unreadable: {e}") from e


def save_ensemble(ensemble: Ensemble, sink) -> None:
    """Write to a path or a text stream."""
    text = dumps_ensemble(ensemble)
    if hasattr(sink, 'write'):
        sink.write(text)
        return
    with open(sink, 'w', encoding='utf-8', newline='\n') as stream:
        stream.write(text)
    logger.info(f"Saved ensemble with {len(ensemble.members)} members to {sink}")


def load_ensemble(source) -> Ensemble:
    """Read from a path or a text stream."""
    if hasattr(source, 'read'):
        return loads_ensemble(source.read())
    with open(source, encoding='utf-8', newline='') as stream:
        return loads_ensemble(stream.read())
