"""
Test factories for performance app.
"""
import factory

from performance.services import InstanceRuns, RunRecord, RuntimeMatrix, SolverSet, Status


class SolverSetFactory(factory.Factory):
    """Three solvers: naive first, default second, 100s timeout."""

    class Meta:
        model = SolverSet

    names = ('naive', 'gac', 'gac_b')
    naive = 0
    default = 1
    timeout_seconds = 100.0


class RunRecordFactory(factory.Factory):
    """Factory for solved runs."""

    class Meta:
        model = RunRecord

    cpu_seconds = 10.0
    nodes = 1000
    status = Status.SOLVED


def runs(instance, *cells, timeout=100.0):
    """Row from (cpu, nodes) pairs; ``None`` marks a timeout."""
    records = tuple(
        RunRecord(timeout, 0, Status.TIMEOUT) if cell is None else RunRecord(float(cell[0]), int(cell[1]))
        for cell in cells
    )
    return InstanceRuns(instance, records)


def random_matrix(rng, n_instances=100, n_solvers=10, timeout=100.0):
    """Uniform CPU times with about one timeout in five cells."""
    solvers = SolverSet(names=tuple(f's{j}' for j in range(n_solvers)), naive=0, default=1, timeout_seconds=timeout)
    cpu = rng.uniform(0.0, timeout, size=(n_instances, n_solvers))
    solved = rng.random((n_instances, n_solvers)) > 0.2
    cpu[~solved] = timeout
    nodes = rng.integers(0, 10 ** 6, size=(n_instances, n_solvers))
    return RuntimeMatrix.build(solvers, [f'i{k:03d}' for k in range(n_instances)], cpu, nodes, solved)
