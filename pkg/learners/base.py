"""
Training data and the model interface shared by every learner.
"""
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np


class LearnerError(Exception):
    """Raised on invalid training data, hyperparameters or prediction inputs."""
    pass


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """
    Feature rows with class labels drawn from a fixed class alphabet.

    The alphabet order is the tie-break order of every learner.
    """

    features: np.ndarray
    labels: Tuple[str, ...]
    alphabet: Tuple[str, ...]

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2:
            raise LearnerError(f"Features must be a 2-D array, got shape {features.shape}")
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', tuple(self.labels))
        object.__setattr__(self, 'alphabet', tuple(self.alphabet))
        if len(self.labels) != len(features):
            raise LearnerError(f"{len(features)} rows but {len(self.labels)} labels")
        if not self.alphabet or len(set(self.alphabet)) != len(self.alphabet):
            raise LearnerError(f"Class alphabet must be non-empty and unique: {self.alphabet}")
        unknown = set(self.labels) - set(self.alphabet)
        if unknown:
            raise LearnerError(f"Labels outside the class alphabet: {sorted(unknown)}")
        if not np.isfinite(features).all():
            raise LearnerError("Training features must be finite")

    @classmethod
    def from_rows(cls, rows: Sequence[Tuple[Sequence[float], str]], alphabet: Sequence[str],
                  n_features: Optional[int] = None) -> 'TrainingSet':
        """Build from (values, label) pairs; ``n_features`` shapes an empty set."""
        if not rows:
            if n_features is None:
                raise LearnerError("An empty training set needs an explicit feature count")
            return cls(np.empty((0, n_features)), (), alphabet)
        lengths = {len(values) for values, _ in rows}
        if len(lengths) != 1:
            raise LearnerError(f"Rows have differing feature counts: {sorted(lengths)}")
        return cls(np.array([values for values, _ in rows], dtype=float), [label for _, label in rows], alphabet)

    @property
    def n_rows(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def codes(self) -> np.ndarray:
        """Labels as indices into the alphabet."""
        index = {label: i for i, label in enumerate(self.alphabet)}
        return np.array([index[label] for label in self.labels], dtype=np.int64)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.codes, minlength=len(self.alphabet))

    def majority_index(self) -> int:
        """Most frequent class, ties to the alphabet order."""
        return int(np.argmax(self.class_counts()))

    def subset(self, rows: Sequence[int]) -> 'TrainingSet':
        rows = list(rows)
        return TrainingSet(self.features[rows], [self.labels[i] for i in rows], self.alphabet)

    def require_rows(self, learner: str) -> None:
        if self.n_rows == 0:
            raise LearnerError(f"Cannot train {learner} on an empty training set")

    def describe(self) -> str:
        counts = Counter(self.labels)
        return f"{self.n_rows} rows x {self.n_features} features, classes {dict(sorted(counts.items()))}"


class Model(ABC):
    """
    A trained classifier over a fixed feature arity and class alphabet.

    Subclasses set ``kind`` and implement ``_predict_index`` and ``_params``;
    ``to_dict``/``from_dict`` give a JSON-friendly form that predicts
    identically after reloading.
    """

    kind: ClassVar[str] = ''
    _registry: ClassVar[Dict[str, Type['Model']]] = {}

    def __init__(self, n_features: int, alphabet: Sequence[str]):
        self.n_features = int(n_features)
        self.alphabet = tuple(alphabet)

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.kind:
            Model._registry[cls.kind] = cls

    def predict(self, values) -> str:
        x = np.asarray(values, dtype=float).reshape(-1)
        if x.shape[0] != self.n_features:
            raise LearnerError(f"{self.kind} model expects {self.n_features} features, got {x.shape[0]}")
        return self.alphabet[self._predict_index(x)]

    def predict_many(self, rows) -> List[str]:
        return [self.predict(row) for row in np.asarray(rows, dtype=float).reshape(-1, self.n_features)]

    @abstractmethod
    def _predict_index(self, x: np.ndarray) -> int:
        """Alphabet index predicted for a feature row of the right arity."""

    @abstractmethod
    def _params(self) -> dict:
        """Learned parameters as plain JSON types."""

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'n_features': self.n_features,
            'alphabet': list(self.alphabet),
            'params': self._params(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Model':
        try:
            model_cls = Model._registry[data['kind']]
            return model_cls._from_params(data['n_features'], data['alphabet'], data['params'])
        except KeyError as e:
            raise LearnerError(f"Unknown model kind or missing field: {e}") from None

    @classmethod
    @abstractmethod
    def _from_params(cls, n_features: int, alphabet: Sequence[str], params: dict) -> 'Model':
        """Inverse of ``_params``."""


class ConstantModel(Model):
    """Always predicts one class."""

    kind = 'constant'

    def __init__(self, n_features: int, alphabet: Sequence[str], label_index: int):
        super().__init__(n_features, alphabet)
        if not 0 <= label_index < len(self.alphabet):
            raise LearnerError(f"Label index {label_index} outside the alphabet")
        self.label_index = int(label_index)

    @classmethod
    def for_label(cls, n_features: int, alphabet: Sequence[str], label: str) -> 'ConstantModel':
        if label not in alphabet:
            raise LearnerError(f"Label {label!r} is not in the alphabet {tuple(alphabet)}")
        return cls(n_features, alphabet, list(alphabet).index(label))

    def _predict_index(self, x):
        return self.label_index

    def _params(self):
        return {'label_index': self.label_index}

    @classmethod
    def _from_params(cls, n_features, alphabet, params):
        return cls(n_features, alphabet, params['label_index'])
