"""
Tests for constraint satisfaction and tuple sampling.
"""
import itertools
from collections import Counter

import numpy as np
import pytest

from instances.domain import ConstraintError, Instance
from instances.semantics import (
    count_violations,
    enumerate_tuples,
    sample_valid_tuple,
    sample_valid_tuples,
    satisfies,
)
from instances.tests.factories import (
    AllDifferentFactory,
    ExtensionFactory,
    InstanceFactory,
    RelationFactory,
    VariableFactory,
)


def _instance(*domains, constraints=()):
    variables = tuple(VariableFactory(name=f'x{i}', domain=d) for i, d in enumerate(domains))
    return Instance(name='t', variables=variables, constraints=tuple(constraints))


class TestSatisfies:
    """Test satisfies."""

    def test_alldifferent(self):
        """Test alldifferent needs pairwise distinct values."""
        c = AllDifferentFactory(scope=(0, 1, 2))
        assert satisfies(c, (1, 2, 3)) is True
        assert satisfies(c, (1, 1, 3)) is False

    def test_relation(self):
        """Test x op (y + offset)."""
        assert satisfies(RelationFactory(op='<'), (2, 5)) is True
        assert satisfies(RelationFactory(op='<', offset=-3), (2, 5)) is True
        assert satisfies(RelationFactory(op='<', offset=-4), (2, 5)) is False
        assert satisfies(RelationFactory(op='='), (4, 4)) is True
        assert satisfies(RelationFactory(op='>=', offset=1), (4, 4)) is False

    def test_extension_forbidden(self):
        """Test forbidden tuples are disallowed."""
        c = ExtensionFactory(tuples=frozenset({(0, 0)}), allowed=False)
        assert satisfies(c, (0, 0)) is False
        assert satisfies(c, (0, 1)) is True

    def test_extension_allowed(self):
        """Test allowed tuples are the only satisfying ones."""
        c = ExtensionFactory(tuples=frozenset({(0, 1)}))
        assert satisfies(c, (0, 1)) is True
        assert satisfies(c, (1, 0)) is False

    def test_arity_mismatch(self):
        """Test wrong-length assignments are rejected."""
        with pytest.raises(ConstraintError):
            satisfies(AllDifferentFactory(scope=(0, 1, 2)), (1, 2))

    def test_value_outside_domain(self):
        """Test domain checking when the instance is supplied."""
        inst = _instance((0, 1), (0, 1))
        with pytest.raises(ConstraintError, match='outside its domain'):
            satisfies(RelationFactory(), (0, 5), inst)

    def test_extension_matches_brute_force(self):
        """Test satisfies agrees with tuple membership over the full product."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            domains = [tuple(range(int(rng.integers(1, 5)))) for _ in range(3)]
            product = list(itertools.product(*domains))
            picked = frozenset(p for p in product if rng.random() < 0.4)
            allowed = bool(rng.random() < 0.5)
            c = ExtensionFactory(scope=(0, 1, 2), tuples=picked, allowed=allowed)
            inst = _instance(*domains, constraints=[c])
            for t in product:
                assert satisfies(c, t, inst) == ((t in picked) == allowed)


class TestCountViolations:
    """Test the vectorised checker agrees with satisfies."""

    @pytest.mark.parametrize('constraint', [
        AllDifferentFactory(scope=(0, 1, 2)),
        RelationFactory(scope=(0, 1), op='<=', offset=1),
        RelationFactory(scope=(2, 0), op='!='),
        ExtensionFactory(scope=(1, 2), tuples=frozenset({(0, 0), (2, 1)}), allowed=False),
        ExtensionFactory(scope=(0, 1, 2), tuples=frozenset({(0, 1, 2), (1, 1, 1)})),
    ])
    def test_agrees_with_satisfies(self, constraint):
        """Test counts over the enumerated domain product."""
        inst = _instance((0, 1, 2), (0, 1, 2), (0, 1, 2), constraints=[constraint])
        rows = enumerate_tuples(constraint, inst)
        expected = sum(not satisfies(constraint, tuple(r)) for r in rows.tolist())
        assert count_violations(constraint, rows) == expected

    def test_shape_mismatch(self):
        """Test arrays of the wrong width are rejected."""
        with pytest.raises(ConstraintError):
            count_violations(AllDifferentFactory(scope=(0, 1, 2)), np.zeros((4, 2)))


class TestSampleValidTuple:
    """Test domain-valid tuple sampling."""

    def test_uniform_frequencies(self):
        """Test each tuple of {0,1}x{0,1} appears with frequency 0.25 +- 0.02."""
        inst = InstanceFactory(variables=(
            VariableFactory(domain=(0, 1)), VariableFactory(domain=(0, 1)),
        ))
        c = AllDifferentFactory(scope=(0, 1))
        rng = np.random.default_rng(2024)
        counts = Counter(sample_valid_tuple(c, inst, rng) for _ in range(10000))
        assert set(counts) == {(0, 0), (0, 1), (1, 0), (1, 1)}
        for count in counts.values():
            assert abs(count / 10000 - 0.25) <= 0.02

    def test_singleton_domains(self):
        """Test forced values."""
        inst = InstanceFactory(variables=(
            VariableFactory(domain=(3,)), VariableFactory(domain=(7,)),
        ))
        c = RelationFactory(scope=(0, 1))
        rng = np.random.default_rng(0)
        assert {sample_valid_tuple(c, inst, rng) for _ in range(20)} == {(3, 7)}

    def test_deterministic(self):
        """Test same seed gives the same sequence."""
        inst = _instance(tuple(range(10)), tuple(range(4)), tuple(range(7)))
        c = AllDifferentFactory(scope=(2, 0, 1))
        rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
        seq_a = [sample_valid_tuple(c, inst, rng_a) for _ in range(50)]
        seq_b = [sample_valid_tuple(c, inst, rng_b) for _ in range(50)]
        assert seq_a == seq_b
        assert all(t[0] in range(7) and t[1] in range(10) for t in seq_a)

    def test_batch_values_in_domain(self):
        """Test batched draws respect each position's domain."""
        inst = _instance((1, 5, 9), (-2, 0))
        c = RelationFactory(scope=(1, 0))
        rows = sample_valid_tuples(c, inst, np.random.default_rng(1), 500)
        assert rows.shape == (500, 2)
        assert set(rows[:, 0].tolist()) == {-2, 0}
        assert set(rows[:, 1].tolist()) == {1, 5, 9}
