"""
End-to-end tests of the command-line pipeline on synthetic data.
"""
import csv
from io import StringIO
from pathlib import Path

import pytest
from django.core.management import CommandError, call_command

from evaluation.reports import read_reports_csv


def _run(name, **options):
    stdout = StringIO()
    call_command(name, stdout=stdout, **options)
    return stdout.getvalue()


@pytest.fixture
def pipeline_files(synth_workspace):
    """Features, labels and an ensemble for the synthetic workspace."""
    root = synth_workspace
    files = {
        'instances': root / 'instances',
        'runtimes': root / 'runtimes.csv',
        'solvers': root / 'solvers.txt',
        'features': root / 'features.csv',
        'labels': root / 'labels.csv',
        'ensemble': root / 'model.ens',
    }
    _run('extract', instances=str(files['instances']), out=str(files['features']), feature_set='cheap', seed=1)
    _run('label', runtimes=str(files['runtimes']), solvers=str(files['solvers']), out=str(files['labels']))
    _run('train', features=str(files['features']), labels=str(files['labels']), solvers=str(files['solvers']),
         out=str(files['ensemble']), seed=1)
    return {name: str(path) for name, path in files.items()}


class TestPipelineCommands:
    """Test synth, extract, label, train, predict, evaluate, crossval and report together."""

    def test_synth_output(self, tmp_path):
        """Test the synth command writes the workspace."""
        output = _run('synth', out=str(tmp_path), instances=12, seed=3)
        assert 'Generated 12 instance(s)' in output
        assert len(list((tmp_path / 'instances').glob('*.csp'))) == 12
        assert (tmp_path / 'planted.csv').is_file()

    def test_predict(self, pipeline_files, tmp_path):
        """Test predictions for every instance."""
        out = tmp_path / 'predictions.csv'
        _run('predict', ensemble=pipeline_files['ensemble'], features=pipeline_files['features'], out=str(out))
        with out.open(encoding='utf-8', newline='') as stream:
            assert len(list(csv.reader(stream))) == 25

    def test_evaluate(self, pipeline_files, tmp_path):
        """Test baseline, individual and meta rows."""
        out = tmp_path / 'evaluation.csv'
        output = _run('evaluate', features=pipeline_files['features'], runtimes=pipeline_files['runtimes'],
                      solvers=pipeline_files['solvers'], ensemble=pipeline_files['ensemble'], out=str(out), seed=2)
        rows = read_reports_csv(out.read_text(encoding='utf-8'))
        names = [row.classifier for row in rows]
        assert names[:4] == ['oracle', 'anti_oracle', 'default', 'random']
        assert names[4].startswith('best_individual:')
        assert names[5].startswith('worst_individual:')
        assert names[6] == 'meta'
        by_name = {row.classifier: row for row in rows}
        assert by_name['oracle'].total_penalty == 0
        assert all(0 <= row.total_penalty <= by_name['anti_oracle'].total_penalty for row in rows)
        assert {row.condition for row in rows} == {'cost_model'}
        assert {row.feature_set for row in rows} == {'cheap'}
        assert 'saving over default' in output

    def test_crossval_and_report(self, pipeline_files, tmp_path):
        """Test the learner x condition table."""
        crossval = tmp_path / 'crossval.csv'
        _run('crossval', features=pipeline_files['features'], runtimes=pipeline_files['runtimes'],
             solvers=pipeline_files['solvers'], learners='oner,tree', out=str(crossval), seed=0)
        rows = read_reports_csv(crossval.read_text(encoding='utf-8'))
        assert [(row.classifier, row.condition) for row in rows] == [
            ('oner', 'all_equal'), ('oner', 'cost_model'), ('tree', 'all_equal'), ('tree', 'cost_model'),
        ]

        table = tmp_path / 'table.csv'
        output = _run('report', reports=[str(crossval)], out=str(table))
        lines = table.read_text(encoding='utf-8').splitlines()
        assert lines[0] == 'classifier,all_equal,cost_model'
        assert len(lines) == 3
        assert 'oner' in output

    def test_evaluate_baselines_only(self, pipeline_files):
        """Test evaluation without an ensemble."""
        output = _run('evaluate', features=pipeline_files['features'], runtimes=pipeline_files['runtimes'],
                      solvers=pipeline_files['solvers'], baselines='oracle,default')
        assert 'baseline' in output
        assert 'anti_oracle' not in output


class TestCommandErrors:
    """Test distinct diagnostics."""

    def test_instance_mismatch(self, pipeline_files, tmp_path):
        """Test features that miss instances of the runtime file."""
        lines = Path(pipeline_files['features']).read_text(encoding='utf-8').splitlines()
        partial = tmp_path / 'partial.csv'
        partial.write_text('\n'.join(lines[:-3]) + '\n', encoding='utf-8')
        with pytest.raises(CommandError, match='different instances'):
            _run('evaluate', features=str(partial), runtimes=pipeline_files['runtimes'],
                 solvers=pipeline_files['solvers'])

    def test_unknown_baseline(self, pipeline_files):
        """Test an unknown baseline name."""
        with pytest.raises(CommandError, match='Unknown baseline'):
            _run('evaluate', features=pipeline_files['features'], runtimes=pipeline_files['runtimes'],
                 solvers=pipeline_files['solvers'], baselines='oracle,magic')

    def test_schema_mismatch(self, pipeline_files, tmp_path):
        """Test full features against a cheap ensemble."""
        full = tmp_path / 'full.csv'
        _run('extract', instances=pipeline_files['instances'], out=str(full), feature_set='full', seed=1)
        with pytest.raises(CommandError, match='trained on 29'):
            _run('evaluate', features=str(full), runtimes=pipeline_files['runtimes'],
                 solvers=pipeline_files['solvers'], ensemble=pipeline_files['ensemble'])

    def test_missing_report(self, tmp_path):
        """Test a missing report file."""
        with pytest.raises(CommandError, match='File not found'):
            _run('report', reports=[str(tmp_path / 'nope.csv')])

    def test_bad_report(self, tmp_path):
        """Test a file that is not a report."""
        path = tmp_path / 'labels.csv'
        path.write_text('instance,label,cost_seconds\n', encoding='utf-8')
        with pytest.raises(CommandError, match='Invalid report file'):
            _run('report', reports=[str(path)])

    def test_bad_synth_settings(self, tmp_path):
        """Test an invalid noise probability."""
        with pytest.raises(CommandError, match='Invalid synth settings'):
            _run('synth', out=str(tmp_path), instances=5, noise=2.0)

    def test_invalid_runtimes(self, pipeline_files, tmp_path):
        """Test a runtime file with a missing cell."""
        lines = Path(pipeline_files['runtimes']).read_text(encoding='utf-8').splitlines()
        broken = tmp_path / 'runtimes.csv'
        broken.write_text('\n'.join(lines[:-1]) + '\n', encoding='utf-8')
        with pytest.raises(CommandError, match='Invalid runtime file'):
            _run('label', runtimes=str(broken), solvers=pipeline_files['solvers'], out=str(tmp_path / 'l.csv'))
