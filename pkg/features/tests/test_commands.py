"""
Tests for the extract management command and its Celery task.
"""
from io import StringIO

import pytest
from django.core.management import CommandError, call_command

from features.services import read_features_csv
from features.tasks import extract_instance_file
from instances.parser import render_instance


@pytest.fixture
def instance_dir(tmp_path, triangle_instance, path_instance):
    directory = tmp_path / 'instances'
    directory.mkdir()
    for inst in (triangle_instance, path_instance):
        (directory / f'{inst.name}.csp').write_text(render_instance(inst), encoding='utf-8')
    return directory


class TestExtractCommand:
    """Test the extract command."""

    def test_writes_features(self, instance_dir, tmp_path):
        """Test one row per instance file, sorted by file name."""
        out = tmp_path / 'features.csv'
        stdout = StringIO()
        call_command('extract', instances=str(instance_dir), out=str(out), seed=1, stdout=stdout)
        vectors = read_features_csv(out.read_text(encoding='utf-8'))
        assert [v.instance for v in vectors] == ['path', 'triangle']
        assert 'Wrote 2 feature vector(s)' in stdout.getvalue()

    def test_cheap(self, instance_dir, tmp_path):
        """Test the cheap schema."""
        out = tmp_path / 'features.csv'
        call_command('extract', instances=str(instance_dir), out=str(out), feature_set='cheap', stdout=StringIO())
        assert len(read_features_csv(out.read_text(encoding='utf-8'))[0].values) == 29

    def test_celery_matches_inline(self, instance_dir, tmp_path):
        """Test eager Celery dispatch gives the same vectors."""
        inline, queued = tmp_path / 'a.csv', tmp_path / 'b.csv'
        call_command('extract', instances=str(instance_dir), out=str(inline), seed=2, stdout=StringIO())
        call_command('extract', instances=str(instance_dir), out=str(queued), seed=2, celery=True, stdout=StringIO())
        a = read_features_csv(inline.read_text(encoding='utf-8'))
        b = read_features_csv(queued.read_text(encoding='utf-8'))
        assert [v.values for v in a] == [v.values for v in b]

    def test_missing_directory(self, tmp_path):
        """Test a missing directory."""
        with pytest.raises(CommandError, match='not found'):
            call_command('extract', instances=str(tmp_path / 'nope'), out=str(tmp_path / 'f.csv'))

    def test_empty_directory(self, tmp_path):
        """Test a directory without instance files."""
        with pytest.raises(CommandError, match='No instance files'):
            call_command('extract', instances=str(tmp_path), out=str(tmp_path / 'f.csv'))

    def test_parse_error(self, instance_dir, tmp_path):
        """Test a malformed file names its location."""
        (instance_dir / 'broken.csp').write_text('var x {1,2}\ncon alldifferent ( x y )\n', encoding='utf-8')
        with pytest.raises(CommandError, match='broken.csp'):
            call_command('extract', instances=str(instance_dir), out=str(tmp_path / 'f.csv'), stdout=StringIO())


class TestExtractTask:
    """Test the extract_instance_file task."""

    def test_payload(self, instance_dir):
        """Test the task returns a JSON-friendly payload."""
        payload = extract_instance_file(str(instance_dir / 'triangle.csp'), 'cheap', 0)
        assert payload['instance'] == 'triangle'
        assert payload['feature_set'] == 'cheap'
        assert len(payload['values']) == 29
