"""
Tests for the label management command.
"""
from io import StringIO

import pytest
from django.core.management import CommandError, call_command

from performance.services import read_labels_csv


@pytest.fixture
def runtime_files(tmp_path):
    solvers = tmp_path / 'solvers.txt'
    solvers.write_text('naive naive\ngac default\ngac_b\ntimeout 100\n', encoding='utf-8')
    runtimes = tmp_path / 'runtimes.csv'
    runtimes.write_text(
        'instance,solver,cpu_seconds,nodes,status\n'
        'p,naive,5,10,solved\np,gac,10,100,solved\np,gac_b,12,100,solved\n'
        'q,naive,100,0,timeout\nq,gac,100,0,timeout\nq,gac_b,100,0,timeout\n',
        encoding='utf-8',
    )
    return solvers, runtimes


class TestLabelCommand:
    """Test the label command."""

    def test_writes_labels(self, runtime_files, tmp_path):
        """Test labels and the printed summary."""
        solvers, runtimes = runtime_files
        out = tmp_path / 'labels.csv'
        stdout = StringIO()
        call_command('label', runtimes=str(runtimes), solvers=str(solvers), out=str(out), stdout=stdout)
        labels = read_labels_csv(out.read_text(encoding='utf-8'))
        assert [(l.instance, l.label, l.cost) for l in labels] == [('p', 'naive', 7.0), ('q', 'dont_know', 0.0)]
        assert 'dont_know: 1' in stdout.getvalue()

    def test_missing_file(self, runtime_files, tmp_path):
        """Test a missing runtime file."""
        solvers, _ = runtime_files
        with pytest.raises(CommandError, match='File not found'):
            call_command('label', runtimes=str(tmp_path / 'x.csv'), solvers=str(solvers), out=str(tmp_path / 'o'))

    def test_bad_runtimes(self, runtime_files, tmp_path):
        """Test an incomplete matrix."""
        solvers, runtimes = runtime_files
        runtimes.write_text('instance,solver,cpu_seconds,nodes,status\np,naive,5,10,solved\n', encoding='utf-8')
        with pytest.raises(CommandError, match='Invalid runtime file'):
            call_command('label', runtimes=str(runtimes), solvers=str(solvers), out=str(tmp_path / 'o'))

    def test_timeout_override(self, runtime_files, tmp_path):
        """Test --timeout re-validates timed-out rows."""
        solvers, runtimes = runtime_files
        with pytest.raises(CommandError, match='Invalid runtime file'):
            call_command(
                'label', runtimes=str(runtimes), solvers=str(solvers), out=str(tmp_path / 'o'), timeout=50.0,
            )
