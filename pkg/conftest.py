"""
Pytest configuration and shared fixtures.
"""
import numpy as np
import pytest

from instances.domain import Constraint, ConstraintKind, Instance, Variable


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def triangle_instance():
    """alldifferent over three variables with domains {1,2,3}."""
    variables = tuple(Variable(name=n, domain=(1, 2, 3)) for n in 'xyz')
    return Instance(
        name='triangle',
        variables=variables,
        constraints=(Constraint(kind=ConstraintKind.ALLDIFFERENT, scope=(0, 1, 2)),),
    )


@pytest.fixture
def path_instance():
    """x < y and y < z over {0..9}."""
    variables = tuple(Variable(name=n, domain=tuple(range(10))) for n in 'xyz')
    return Instance(
        name='path',
        variables=variables,
        constraints=(
            Constraint(kind=ConstraintKind.RELATION, scope=(0, 1), op='<'),
            Constraint(kind=ConstraintKind.RELATION, scope=(1, 2), op='<'),
        ),
    )


@pytest.fixture
def synth_workspace(tmp_path):
    """Small synthetic dataset written to disk (instances, runtimes, solvers, planted log)."""
    from evaluation.synth import SynthSpec, synth_generate, write_synth

    result = synth_generate(SynthSpec(n_instances=24, seed=7))
    write_synth(result, tmp_path)
    return tmp_path
