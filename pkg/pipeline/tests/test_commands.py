"""
Tests for the train and predict management commands.
"""
import csv
from io import StringIO

import numpy as np
import pytest
from django.core.management import CommandError, call_command

from features.services import CHEAP_FEATURES, FULL_FEATURES, FeatureVector, write_features_csv
from performance.services import DONT_KNOW, Label, render_solvers_file, write_labels_csv
from pipeline.persistence import dumps_ensemble, load_ensemble
from pipeline.tests.factories import planted_rows, solver_set


@pytest.fixture
def training_files(tmp_path):
    """Cheap feature vectors whose first two columns carry the planted labels."""
    rows = planted_rows(45, seed=3)
    vectors, labels = [], []
    for row in rows:
        values = np.full(len(CHEAP_FEATURES), 0.5)
        values[:3] = row.values
        vectors.append(FeatureVector(row.instance, CHEAP_FEATURES, values, 'cheap'))
        labels.append(Label(row.instance, row.label, row.cost))
    labels[0] = Label(labels[0].instance, DONT_KNOW, 0.0)

    paths = {name: tmp_path / name for name in ('features.csv', 'labels.csv', 'solvers.txt')}
    with paths['features.csv'].open('w', encoding='utf-8', newline='') as stream:
        write_features_csv(vectors, stream)
    with paths['labels.csv'].open('w', encoding='utf-8', newline='') as stream:
        write_labels_csv(labels, stream)
    paths['solvers.txt'].write_text(render_solvers_file(solver_set()), encoding='utf-8')
    return {name.split('.')[0]: str(path) for name, path in paths.items()}


def _train(files, out, **options):
    stdout = StringIO()
    call_command('train', features=files['features'], labels=files['labels'], solvers=files['solvers'],
                 out=str(out), stdout=stdout, **options)
    return stdout.getvalue()


class TestTrainCommand:
    """Test the train command."""

    def test_trains_ensemble(self, training_files, tmp_path):
        """Test the default bank and fold count."""
        out = tmp_path / 'model.ens'
        output = _train(training_files, out, seed=1)
        ensemble = load_ensemble(out)
        assert len(ensemble.members) == 15
        assert len(ensemble.feature_names) == 29
        assert 'dont_know excluded: 1' in output

    def test_learner_subset(self, training_files, tmp_path):
        """Test --learners and --folds."""
        out = tmp_path / 'model.ens'
        _train(training_files, out, learners='tree,knn', folds=2, seed=1)
        ensemble = load_ensemble(out)
        assert ensemble.learners == ('tree', 'knn')
        assert len(ensemble.members) == 4

    def test_flags_recorded(self, training_files, tmp_path):
        """Test --no-duplicate and --strict-folds reach the ensemble."""
        out = tmp_path / 'model.ens'
        _train(training_files, out, learners='tree', no_duplicate=True, strict_folds=True)
        ensemble = load_ensemble(out)
        assert ensemble.duplicate is False
        assert ensemble.strict_folds is True

    def test_celery_matches_inline(self, training_files, tmp_path):
        """Test eager Celery training writes the same file."""
        inline, queued = tmp_path / 'a.ens', tmp_path / 'b.ens'
        _train(training_files, inline, learners='oner,tree', seed=5)
        _train(training_files, queued, learners='oner,tree', seed=5, celery=True)
        assert dumps_ensemble(load_ensemble(inline)) == dumps_ensemble(load_ensemble(queued))

    def test_unknown_learner(self, training_files, tmp_path):
        """Test an unknown learner name."""
        with pytest.raises(CommandError, match='available'):
            _train(training_files, tmp_path / 'm.ens', learners='svm')

    def test_too_many_folds(self, training_files, tmp_path):
        """Test a fold count larger than the data."""
        with pytest.raises(CommandError, match='Training failed'):
            _train(training_files, tmp_path / 'm.ens', learners='tree', folds=1000, no_duplicate=True)

    def test_missing_labels(self, training_files, tmp_path):
        """Test a missing labels file."""
        training_files['labels'] = str(tmp_path / 'nope.csv')
        with pytest.raises(CommandError, match='File not found'):
            _train(training_files, tmp_path / 'm.ens')


class TestPredictCommand:
    """Test the predict command."""

    def test_predicts(self, training_files, tmp_path):
        """Test one row per instance naming a solver."""
        model = tmp_path / 'model.ens'
        _train(training_files, model, learners='tree', seed=0)
        out = tmp_path / 'predictions.csv'
        stdout = StringIO()
        call_command('predict', ensemble=str(model), features=training_files['features'], out=str(out), stdout=stdout)
        with out.open(encoding='utf-8', newline='') as stream:
            rows = list(csv.reader(stream))
        assert rows[0] == ['instance', 'solver']
        assert len(rows) == 46
        assert {solver for _, solver in rows[1:]} <= set(solver_set().names)
        assert 'Mean predict time' in stdout.getvalue()

    def test_corrupt_ensemble(self, training_files, tmp_path):
        """Test a truncated ensemble file."""
        model = tmp_path / 'model.ens'
        _train(training_files, model, learners='zeror')
        model.write_text(model.read_text(encoding='utf-8')[:40], encoding='utf-8')
        with pytest.raises(CommandError, match='corrupt'):
            call_command('predict', ensemble=str(model), features=training_files['features'],
                         out=str(tmp_path / 'p.csv'))

    def test_schema_mismatch(self, training_files, tmp_path):
        """Test features with another column set than the ensemble."""
        model = tmp_path / 'model.ens'
        _train(training_files, model, learners='zeror')
        other = tmp_path / 'full.csv'
        full = FeatureVector('x', FULL_FEATURES, np.zeros(len(FULL_FEATURES)), 'full')
        with other.open('w', encoding='utf-8', newline='') as stream:
            write_features_csv([full], stream)
        with pytest.raises(CommandError, match='trained on 29'):
            call_command('predict', ensemble=str(model), features=str(other), out=str(tmp_path / 'p.csv'))
