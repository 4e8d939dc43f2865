"""
Tests for training sets and the model interface.
"""
import json

import numpy as np
import pytest

from learners import LEARNER_NAMES, train
from learners.base import ConstantModel, LearnerError, Model, TrainingSet
from learners.services import learner_params, validate_learners
from learners.tests.factories import TrainingSetFactory


class TestTrainingSet:
    """Test TrainingSet validation and helpers."""

    def test_codes_and_counts(self):
        """Test labels map to alphabet indices."""
        ts = TrainingSet([[0.0], [1.0], [2.0]], ['B', 'A', 'B'], ('A', 'B', 'C'))
        assert ts.codes.tolist() == [1, 0, 1]
        assert ts.class_counts().tolist() == [1, 2, 0]
        assert ts.majority_index() == 1

    def test_majority_tie(self):
        """Test ties go to the alphabet order."""
        assert TrainingSet([[0.0], [1.0]], ['B', 'A'], ('A', 'B')).majority_index() == 0

    def test_label_outside_alphabet(self):
        """Test unknown labels are rejected."""
        with pytest.raises(LearnerError):
            TrainingSet([[0.0]], ['Z'], ('A',))

    def test_ragged_rows(self):
        """Test rows must share one arity."""
        with pytest.raises(LearnerError):
            TrainingSet.from_rows([([0.0, 1.0], 'A'), ([0.0], 'A')], ('A',))

    def test_non_finite(self):
        """Test NaN features are rejected."""
        with pytest.raises(LearnerError):
            TrainingSet([[np.nan]], ['A'], ('A',))

    def test_empty(self):
        """Test empty sets need a feature count and cannot be trained on."""
        ts = TrainingSet.from_rows([], ('A', 'B'), n_features=3)
        assert ts.n_rows == 0
        assert ts.n_features == 3
        for name in LEARNER_NAMES:
            with pytest.raises(LearnerError):
                train(name, ts)

    def test_subset(self):
        """Test row selection keeps the alphabet."""
        ts = TrainingSetFactory(n_rows=10)
        part = ts.subset([0, 2])
        assert part.n_rows == 2
        assert part.alphabet == ts.alphabet


class TestModelInterface:
    """Test predict and serialisation shared by all models."""

    def test_constant(self):
        """Test a constant model."""
        model = ConstantModel.for_label(2, ('A', 'B'), 'B')
        assert model.predict([1.0, 2.0]) == 'B'
        assert model.to_dict() == {'kind': 'constant', 'n_features': 2, 'alphabet': ['A', 'B'], 'params': {'label_index': 1}}

    def test_constant_unknown_label(self):
        """Test the label must be in the alphabet."""
        with pytest.raises(LearnerError):
            ConstantModel.for_label(2, ('A',), 'B')

    def test_arity_mismatch(self):
        """Test predict checks the feature count."""
        model = train('zeror', TrainingSetFactory())
        with pytest.raises(LearnerError):
            model.predict([0.0, 1.0])

    def test_unknown_kind(self):
        """Test deserialising an unknown model kind."""
        with pytest.raises(LearnerError):
            Model.from_dict({'kind': 'forest', 'n_features': 1, 'alphabet': ['A'], 'params': {}})

    @pytest.mark.parametrize('name', LEARNER_NAMES)
    def test_json_reload(self, name):
        """Test a reloaded model predicts identically."""
        ts = TrainingSetFactory(n_rows=60, seed=4)
        model = train(name, ts)
        reloaded = Model.from_dict(json.loads(json.dumps(model.to_dict())))
        probes = np.random.default_rng(9).normal(scale=2.0, size=(200, ts.n_features))
        assert reloaded.predict_many(probes) == model.predict_many(probes)

    @pytest.mark.parametrize('name', LEARNER_NAMES)
    def test_deterministic(self, name):
        """Test identical training data gives identical predictions."""
        probes = np.random.default_rng(2).normal(size=(100, 4))
        first = train(name, TrainingSetFactory(seed=5)).predict_many(probes)
        second = train(name, TrainingSetFactory(seed=5)).predict_many(probes)
        assert first == second
        assert set(first) <= {'A', 'B'}


class TestRegistry:
    """Test learner lookup and parameters."""

    def test_names(self):
        """Test the five learners."""
        assert LEARNER_NAMES == ('zeror', 'oner', 'nbayes', 'knn', 'tree')

    def test_params_from_settings(self, settings):
        """Test hyperparameters come from CSPSEL settings."""
        settings.CSPSEL = {**settings.CSPSEL, 'KNN_K': 3}
        assert learner_params('knn') == {'k': 3}
        assert learner_params('tree') == {'max_depth': 20, 'min_leaf': 2}

    def test_unknown_learner(self):
        """Test unknown names."""
        with pytest.raises(LearnerError):
            train('svm', TrainingSetFactory())

    def test_unknown_param(self):
        """Test unknown hyperparameters."""
        with pytest.raises(LearnerError):
            train('knn', TrainingSetFactory(), depth=3)

    def test_validate_learners(self):
        """Test duplicate or empty banks."""
        assert validate_learners(['tree', 'knn']) == ('tree', 'knn')
        with pytest.raises(LearnerError):
            validate_learners([])
        with pytest.raises(LearnerError):
            validate_learners(['tree', 'tree'])
