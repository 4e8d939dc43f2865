"""
Solver runtime data: solver sets, runtime matrices, labeling and penalties.
"""
import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from cspsel.conf import resolve

logger = logging.getLogger(__name__)

DONT_KNOW = 'dont_know'


class RuntimeDataError(Exception):
    """Raised when a runtime or labels file is malformed or incomplete."""
    pass


class SolverSetError(Exception):
    """Raised when a solver set is invalid."""
    pass


class PenaltyUndefinedError(Exception):
    """Raised when a penalty is requested for an instance no solver solved."""
    pass


class Status(str, Enum):
    SOLVED = 'solved'
    TIMEOUT = 'timeout'


@dataclass(frozen=True)
class SolverSet:
    """Ordered solver names with the naive and default roles and the timeout."""

    names: Tuple[str, ...]
    naive: int
    default: int
    timeout_seconds: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'names', tuple(self.names))
        object.__setattr__(self, 'timeout_seconds', float(resolve(self.timeout_seconds, 'TIMEOUT_SECONDS')))
        if len(self.names) < 2:
            raise SolverSetError("A solver set needs at least two solvers")
        if len(set(self.names)) != len(self.names):
            raise SolverSetError(f"Duplicate solver names: {self.names}")
        if DONT_KNOW in self.names:
            raise SolverSetError(f"{DONT_KNOW!r} is reserved and cannot name a solver")
        for role, index in (('naive', self.naive), ('default', self.default)):
            if not 0 <= index < len(self.names):
                raise SolverSetError(f"{role} index {index} out of range")
        if not self.timeout_seconds > 0:
            raise SolverSetError("Timeout must be positive")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SolverSetError(f"Unknown solver {name!r}") from None

    def to_dict(self) -> dict:
        return {
            'names': list(self.names),
            'naive': self.naive,
            'default': self.default,
            'timeout_seconds': self.timeout_seconds,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SolverSet':
        return cls(
            names=tuple(data['names']),
            naive=data['naive'],
            default=data['default'],
            timeout_seconds=data['timeout_seconds'],
        )

    @property
    def naive_name(self) -> str:
        return self.names[self.naive]

    @property
    def default_name(self) -> str:
        return self.names[self.default]

    @property
    def propagating(self) -> Tuple[str, ...]:
        """Non-naive solvers in solver order."""
        return tuple(n for i, n in enumerate(self.names) if i != self.naive)


def parse_solvers_file(text: str, timeout_seconds: Optional[float] = None) -> SolverSet:
    """
    Parse a solvers file.

    One solver per line, ``name [naive] [default]``, in solver order, plus an
    optional ``timeout <seconds>`` line. ``#`` starts a comment. An explicit
    ``timeout_seconds`` argument overrides the file.
    """
    names: List[str] = []
    naive = default = None
    file_timeout = None
    for line_no, raw in enumerate(text.splitlines(), 1):
        words = raw.split('#', 1)[0].split()
        if not words:
            continue
        if words[0] == 'timeout':
            try:
                (value,) = words[1:]
                file_timeout = float(value)
            except ValueError:
                raise SolverSetError(f"Line {line_no}: expected 'timeout <seconds>'") from None
            continue
        name, *flags = words
        for flag in flags:
            if flag == 'naive':
                if naive is not None:
                    raise SolverSetError(f"Line {line_no}: more than one naive solver")
                naive = len(names)
            elif flag == 'default':
                if default is not None:
                    raise SolverSetError(f"Line {line_no}: more than one default solver")
                default = len(names)
            else:
                raise SolverSetError(f"Line {line_no}: unknown solver flag {flag!r}")
        names.append(name)
    if naive is None or default is None:
        raise SolverSetError("Solvers file must mark one naive and one default solver")
    timeout = timeout_seconds if timeout_seconds is not None else file_timeout
    return SolverSet(names=tuple(names), naive=naive, default=default, timeout_seconds=timeout)


def render_solvers_file(solvers: SolverSet) -> str:
    lines = [f'timeout {solvers.timeout_seconds:g}']
    for index, name in enumerate(solvers.names):
        flags = [flag for flag, role in (('naive', solvers.naive), ('default', solvers.default)) if role == index]
        lines.append(' '.join([name, *flags]))
    return '\n'.join(lines) + '\n'


@dataclass(frozen=True)
class RunRecord:
    cpu_seconds: float
    nodes: int
    status: Status = Status.SOLVED

    def __post_init__(self):
        object.__setattr__(self, 'status', Status(self.status))

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


@dataclass(frozen=True)
class InstanceRuns:
    """All solver records of one instance, in solver order."""

    instance: str
    records: Tuple[RunRecord, ...]

    @property
    def cpu(self) -> np.ndarray:
        return np.array([r.cpu_seconds for r in self.records], dtype=float)

    @property
    def solved(self) -> np.ndarray:
        return np.array([r.solved for r in self.records], dtype=bool)

    @property
    def any_solved(self) -> bool:
        return any(r.solved for r in self.records)

    def fastest_cpu(self) -> float:
        if not self.any_solved:
            raise PenaltyUndefinedError(f"No solver solved instance {self.instance}")
        return min(r.cpu_seconds for r in self.records if r.solved)


@dataclass(frozen=True, eq=False)
class RuntimeMatrix:
    """
    Complete (instance, solver) runtime table.

    Arrays are indexed [instance, solver]; instances are kept sorted by name so
    the matrix does not depend on file row order.
    """

    solvers: SolverSet
    instances: Tuple[str, ...]
    cpu: np.ndarray
    nodes: np.ndarray
    solved: np.ndarray
    _index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        shape = (len(self.instances), len(self.solvers))
        for name in ('cpu', 'nodes', 'solved'):
            if getattr(self, name).shape != shape:
                raise RuntimeDataError(f"{name} array has shape {getattr(self, name).shape}, expected {shape}")
        if len(set(self.instances)) != len(self.instances):
            raise RuntimeDataError("Duplicate instance names in runtime matrix")
        if (self.cpu < 0).any() or (self.nodes < 0).any():
            raise RuntimeDataError("CPU seconds and node counts must be non-negative")
        timeout = self.solvers.timeout_seconds
        if not np.allclose(self.cpu[~self.solved], timeout):
            raise RuntimeDataError(f"Timed-out runs must record cpu_seconds = {timeout:g}")
        if (self.cpu[self.solved] > timeout).any():
            raise RuntimeDataError(f"Solved runs cannot exceed the {timeout:g}s timeout")
        object.__setattr__(self, '_index', {name: i for i, name in enumerate(self.instances)})

    def __len__(self):
        return len(self.instances)

    def index_of(self, instance: str) -> int:
        try:
            return self._index[instance]
        except KeyError:
            raise RuntimeDataError(f"No runtime data for instance {instance!r}") from None

    def row(self, instance: str) -> InstanceRuns:
        i = self.index_of(instance)
        return InstanceRuns(instance, tuple(
            RunRecord(float(self.cpu[i, j]), int(self.nodes[i, j]), Status.SOLVED if self.solved[i, j] else Status.TIMEOUT)
            for j in range(len(self.solvers))
        ))

    def rows(self) -> Iterator[InstanceRuns]:
        for name in self.instances:
            yield self.row(name)

    def subset(self, instances: Iterable[str]) -> 'RuntimeMatrix':
        rows = [self.index_of(name) for name in instances]
        return RuntimeMatrix.build(
            self.solvers, [self.instances[i] for i in rows],
            self.cpu[rows], self.nodes[rows], self.solved[rows],
        )

    @classmethod
    def build(cls, solvers: SolverSet, instances: Sequence[str], cpu, nodes, solved) -> 'RuntimeMatrix':
        """Build from arrays in any instance order; rows are re-sorted by instance name."""
        order = sorted(range(len(instances)), key=lambda i: instances[i])
        cpu = np.asarray(cpu, dtype=float).reshape(len(instances), len(solvers))[order]
        nodes = np.asarray(nodes, dtype=np.int64).reshape(len(instances), len(solvers))[order]
        solved = np.asarray(solved, dtype=bool).reshape(len(instances), len(solvers))[order]
        return cls(solvers=solvers, instances=tuple(instances[i] for i in order), cpu=cpu, nodes=nodes, solved=solved)

    @classmethod
    def from_rows(cls, solvers: SolverSet, rows: Sequence[InstanceRuns]) -> 'RuntimeMatrix':
        for row in rows:
            if len(row.records) != len(solvers):
                raise RuntimeDataError(f"Instance {row.instance} has {len(row.records)} records, expected {len(solvers)}")
        return cls.build(
            solvers,
            [r.instance for r in rows],
            [[rec.cpu_seconds for rec in r.records] for r in rows],
            [[rec.nodes for rec in r.records] for r in rows],
            [[rec.solved for rec in r.records] for r in rows],
        )


RUNTIME_HEADER = ['instance', 'solver', 'cpu_seconds', 'nodes', 'status']


def parse_runtime_csv(text: str, solvers: SolverSet) -> RuntimeMatrix:
    """
    Parse a runtime CSV into a complete matrix.

    Raises:
        RuntimeDataError: On a malformed row, unknown solver, duplicate cell or
            missing (instance, solver) cell
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != RUNTIME_HEADER:
        raise RuntimeDataError(f"Runtime file header must be {','.join(RUNTIME_HEADER)}")

    cells: Dict[Tuple[str, int], RunRecord] = {}
    instances: Dict[str, None] = {}
    for line_no, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(RUNTIME_HEADER):
            raise RuntimeDataError(f"Line {line_no}: expected {len(RUNTIME_HEADER)} fields, got {len(row)}")
        instance, solver, cpu, nodes, status = (value.strip() for value in row)
        try:
            solver_index = solvers.index(solver)
        except SolverSetError:
            raise RuntimeDataError(f"Line {line_no}: unknown solver {solver!r}") from None
        try:
            record = RunRecord(float(cpu), int(nodes), Status(status))
        except ValueError as e:
            raise RuntimeDataError(f"Line {line_no}: {e}") from None
        if not math.isfinite(record.cpu_seconds) or record.cpu_seconds < 0 or record.nodes < 0:
            raise RuntimeDataError(f"Line {line_no}: cpu_seconds and nodes must be non-negative")
        if not record.solved and not math.isclose(record.cpu_seconds, solvers.timeout_seconds):
            raise RuntimeDataError(
                f"Line {line_no}: timeout recorded with cpu_seconds {record.cpu_seconds:g}, "
                f"expected {solvers.timeout_seconds:g}"
            )
        if (instance, solver_index) in cells:
            raise RuntimeDataError(f"Line {line_no}: duplicate cell ({instance}, {solver})")
        cells[(instance, solver_index)] = record
        instances.setdefault(instance)

    rows = []
    for instance in instances:
        records = []
        for j, solver in enumerate(solvers.names):
            if (instance, j) not in cells:
                raise RuntimeDataError(f"Missing runtime for instance {instance!r} and solver {solver!r}")
            records.append(cells[(instance, j)])
        rows.append(InstanceRuns(instance, tuple(records)))
    matrix = RuntimeMatrix.from_rows(solvers, rows)
    logger.info(f"Parsed runtime matrix: {len(matrix)} instances x {len(solvers)} solvers")
    return matrix


def write_runtime_csv(matrix: RuntimeMatrix, stream) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(RUNTIME_HEADER)
    for i, instance in enumerate(matrix.instances):
        for j, solver in enumerate(matrix.solvers.names):
            status = Status.SOLVED if matrix.solved[i, j] else Status.TIMEOUT
            writer.writerow([instance, solver, format(matrix.cpu[i, j], '.17g'), int(matrix.nodes[i, j]), status.value])


@dataclass(frozen=True)
class Label:
    """Training class of one instance (a solver name or ``dont_know``) and its cost."""

    instance: str
    label: str
    cost: float

    @property
    def dont_know(self) -> bool:
        return self.label == DONT_KNOW


def misclassification_penalty(row: InstanceRuns, chosen: int) -> float:
    """
    Extra seconds spent by choosing solver ``chosen`` instead of the fastest.

    A timed-out choice counts as the timeout minus the fastest time, which is
    a lower bound on the true penalty.

    Raises:
        PenaltyUndefinedError: When no solver solved the instance
    """
    fastest = row.fastest_cpu()
    return float(row.records[chosen].cpu_seconds - fastest)


def instance_cost(row: InstanceRuns) -> float:
    """Largest penalty over all solvers; 0 when nothing solved."""
    if not row.any_solved:
        return 0.0
    return max(misclassification_penalty(row, j) for j in range(len(row.records)))


def label_instance(row: InstanceRuns, solvers: SolverSet, cpu_floor: Optional[float] = None) -> Label:
    """
    Class label of an instance.

    The naive solver wins only if it solved the instance and was strictly
    faster than every other solver. Otherwise the solved non-naive solver with
    the most search nodes per CPU second wins, ties going to the earlier
    solver. Nothing solved gives ``dont_know``.
    """
    cpu_floor = resolve(cpu_floor, 'NODES_CPU_FLOOR')
    if len(row.records) != len(solvers):
        raise RuntimeDataError(f"Instance {row.instance} has {len(row.records)} records, expected {len(solvers)}")
    if not row.any_solved:
        return Label(row.instance, DONT_KNOW, 0.0)

    cost = instance_cost(row)
    naive = row.records[solvers.naive]
    others = [r for j, r in enumerate(row.records) if j != solvers.naive]
    if naive.solved and all(naive.cpu_seconds < r.cpu_seconds for r in others):
        return Label(row.instance, solvers.naive_name, cost)

    best_index, best_rate = None, -math.inf
    for j, record in enumerate(row.records):
        if j == solvers.naive or not record.solved:
            continue
        rate = record.nodes / max(record.cpu_seconds, cpu_floor)
        if rate > best_rate:
            best_index, best_rate = j, rate
    if best_index is None:
        # Only the naive solver finished, at exactly the timeout
        return Label(row.instance, solvers.naive_name, cost)
    return Label(row.instance, solvers.names[best_index], cost)


def label_matrix(matrix: RuntimeMatrix, cpu_floor: Optional[float] = None) -> List[Label]:
    return [label_instance(row, matrix.solvers, cpu_floor=cpu_floor) for row in matrix.rows()]


def penalty_table(matrix: RuntimeMatrix) -> np.ndarray:
    """Penalty of every (instance, solver) choice; NaN rows for unsolved instances."""
    masked = np.where(matrix.solved, matrix.cpu, np.inf)
    fastest = masked.min(axis=1, keepdims=True)
    with np.errstate(invalid='ignore'):
        table = matrix.cpu - fastest
    table[~matrix.solved.any(axis=1)] = np.nan
    return table


LABELS_HEADER = ['instance', 'label', 'cost_seconds']


def write_labels_csv(labels: Sequence[Label], stream) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(LABELS_HEADER)
    for label in labels:
        writer.writerow([label.instance, label.label, format(label.cost, '.17g')])


def read_labels_csv(text: str, solvers: Optional[SolverSet] = None) -> List[Label]:
    """Parse a labels CSV; with ``solvers`` every label must name a solver or ``dont_know``."""
    reader = csv.reader(io.StringIO(text))
    if next(reader, None) != LABELS_HEADER:
        raise RuntimeDataError(f"Labels file header must be {','.join(LABELS_HEADER)}")
    labels = []
    seen = set()
    for line_no, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != 3:
            raise RuntimeDataError(f"Line {line_no}: expected 3 fields, got {len(row)}")
        instance, label, cost = row
        if instance in seen:
            raise RuntimeDataError(f"Line {line_no}: duplicate instance {instance!r}")
        seen.add(instance)
        if solvers is not None and label != DONT_KNOW and label not in solvers.names:
            raise RuntimeDataError(f"Line {line_no}: unknown label {label!r}")
        try:
            cost = float(cost)
        except ValueError:
            raise RuntimeDataError(f"Line {line_no}: cost {cost!r} is not a number") from None
        if not math.isfinite(cost) or cost < 0:
            raise RuntimeDataError(f"Line {line_no}: cost must be a non-negative number")
        labels.append(Label(instance, label, cost))
    return labels


@dataclass(frozen=True)
class PortfolioSummary:
    """How the solvers compare across a matrix."""

    instances: int
    wins: Mapping[str, int]
    dont_know: int
    with_timeouts: int
    mean_default_speedup: float
    max_default_speedup: float


def portfolio_summary(matrix: RuntimeMatrix, cpu_floor: Optional[float] = None) -> PortfolioSummary:
    """
    Per-solver count of instances where it is fastest (ties to the earlier
    solver), unsolved and timeout counts, and the speedup of the fastest solver
    over the default (default cpu / fastest cpu, over solved instances).
    """
    cpu_floor = resolve(cpu_floor, 'NODES_CPU_FLOOR')
    solved_rows = matrix.solved.any(axis=1)
    masked = np.where(matrix.solved, matrix.cpu, np.inf)
    winners = masked.argmin(axis=1)[solved_rows]
    counts = np.bincount(winners, minlength=len(matrix.solvers))
    wins = {name: int(counts[j]) for j, name in enumerate(matrix.solvers.names)}

    speedups = np.array([])
    if solved_rows.any():
        fastest = masked.min(axis=1)[solved_rows]
        default_cpu = matrix.cpu[solved_rows, matrix.solvers.default]
        speedups = default_cpu / np.maximum(fastest, cpu_floor)
    return PortfolioSummary(
        instances=len(matrix),
        wins=wins,
        dont_know=int((~solved_rows).sum()),
        with_timeouts=int((~matrix.solved).any(axis=1).sum()),
        mean_default_speedup=float(speedups.mean()) if speedups.size else 0.0,
        max_default_speedup=float(speedups.max()) if speedups.size else 0.0,
    )
