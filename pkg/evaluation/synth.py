"""
Synthetic benchmark generator with a planted best-solver rule.

Every instance carries one or more alldifferent constraints over variables
with equal domains ``0..d-1``, plus binary relations and an occasional
extension constraint. Whether the alldifferent scopes are tight (domain union
at most 1.4 times the arity) or loose (at least twice the arity) decides the
planted best solver:

- tight scopes: the naive decomposition wins;
- loose scopes with domains of 8 or more values: the default solver wins;
- loose scopes with smaller domains: the second propagating solver wins.

The best solver runs in U(1, 100) seconds, the default solver (when it is not
the best) in exactly ``margin`` more, and every other solver in ``margin`` plus
U(0, 50) more unless it times out. Propagating solvers explore the same number
of nodes, the naive decomposition three times as many.
"""
import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from cspsel.conf import resolve
from instances.domain import Constraint, ConstraintKind, Instance, RELATION_OPS, Variable
from instances.parser import render_instance
from performance.services import RuntimeMatrix, SolverSet, render_solvers_file, write_runtime_csv

from .services import EvaluationError

logger = logging.getLogger(__name__)

NAIVE_SOLVER = 'naive_decomp'
DEFAULT_SOLVER = 'gacalldiff'
SECOND_SOLVER = 'gac_b'
PLANTED_HEADER = ['instance', 'planted_best', 'default_penalty']


@dataclass(frozen=True)
class SynthSpec:
    """What to generate."""

    n_instances: int
    seed: int = 0
    margin: float = 10.0
    noise: float = 0.0
    timeout_rate: float = 0.0
    extra_solvers: int = 1
    timeout_seconds: Optional[float] = None
    prefix: str = 'synth'

    def __post_init__(self):
        if self.n_instances < 1:
            raise EvaluationError("Need at least one instance")
        if not self.margin > 0:
            raise EvaluationError("The planted margin must be positive")
        if not 0 <= self.noise <= 1 or not 0 <= self.timeout_rate <= 1:
            raise EvaluationError("noise and timeout_rate are probabilities")
        if self.extra_solvers < 0:
            raise EvaluationError("extra_solvers cannot be negative")

    def solver_set(self) -> SolverSet:
        extra = tuple(f'gac_{chr(ord("c") + i)}' for i in range(self.extra_solvers))
        return SolverSet(
            names=(NAIVE_SOLVER, DEFAULT_SOLVER, SECOND_SOLVER, *extra),
            naive=0, default=1, timeout_seconds=resolve(self.timeout_seconds, 'TIMEOUT_SECONDS'),
        )


@dataclass(frozen=True)
class PlantedRecord:
    instance: str
    planted_best: str
    default_penalty: float


@dataclass(frozen=True)
class SynthResult:
    spec: SynthSpec
    solvers: SolverSet
    instances: Tuple[Instance, ...]
    matrix: RuntimeMatrix
    planted: Tuple[PlantedRecord, ...]


def planted_rule(tight: bool, domain_size: int) -> str:
    if tight:
        return NAIVE_SOLVER
    return DEFAULT_SOLVER if domain_size >= 8 else SECOND_SOLVER


def _scope(rng, n_vars, arity):
    return tuple(sorted(int(i) for i in rng.choice(n_vars, size=arity, replace=False)))


def _random_instance(name: str, rng: np.random.Generator) -> Tuple[Instance, bool, int]:
    d = int(rng.integers(3, 15))
    n_vars = d + int(rng.integers(0, 6))
    tight = d < 4 or bool(rng.random() < 0.5)
    variables = tuple(
        Variable(name=f'x{i}', domain=tuple(range(d)), aux=bool(rng.random() < 0.2))
        for i in range(n_vars)
    )

    constraints: List[Constraint] = []
    for _ in range(int(rng.integers(1, 4))):
        if tight:
            arity = int(rng.integers(math.ceil(d / 1.4), d + 1))
        else:
            arity = int(rng.integers(2, d // 2 + 1))
        constraints.append(Constraint(kind=ConstraintKind.ALLDIFFERENT, scope=_scope(rng, n_vars, arity)))
    for _ in range(int(rng.integers(1, 5))):
        constraints.append(Constraint(
            kind=ConstraintKind.RELATION, scope=_scope(rng, n_vars, 2),
            op=RELATION_OPS[int(rng.integers(len(RELATION_OPS)))], offset=int(rng.integers(-1, 2)),
        ))
    if rng.random() < 0.3:
        pairs = [(a, b) for a in range(d) for b in range(d)]
        keep = rng.random(len(pairs)) < 0.5
        constraints.append(Constraint(
            kind=ConstraintKind.EXTENSION, scope=_scope(rng, n_vars, 2),
            tuples=frozenset(p for p, k in zip(pairs, keep) if k), allowed=bool(rng.random() < 0.5),
        ))
    return Instance(name=name, variables=variables, constraints=tuple(constraints)), tight, d


def synth_generate(spec: SynthSpec) -> SynthResult:
    """
    Generate instances and their runtime matrix.

    The same spec always yields the same result. ``planted_best`` in the
    bookkeeping is the solver that is actually fastest, i.e. after noise.
    """
    rng = np.random.default_rng(spec.seed)
    solvers = spec.solver_set()
    timeout = solvers.timeout_seconds
    n_solvers = len(solvers)

    instances, planted = [], []
    cpu = np.zeros((spec.n_instances, n_solvers))
    nodes = np.zeros((spec.n_instances, n_solvers), dtype=np.int64)
    solved = np.ones((spec.n_instances, n_solvers), dtype=bool)
    width = len(str(spec.n_instances - 1))
    for i in range(spec.n_instances):
        name = f'{spec.prefix}{i:0{width}d}'
        instance, tight, d = _random_instance(name, rng)
        best = solvers.index(planted_rule(tight, d))
        flip, replacement = rng.random(), int(rng.integers(n_solvers - 1))
        if flip < spec.noise:
            best = replacement if replacement < best else replacement + 1

        best_cpu = float(rng.uniform(1.0, 100.0))
        slack = rng.uniform(0.0, 50.0, size=n_solvers)
        timeouts = rng.random(n_solvers) < spec.timeout_rate
        base_nodes = int(rng.integers(1_000, 100_000))
        for j in range(n_solvers):
            nodes[i, j] = base_nodes * (3 if j == solvers.naive else 1)
            if j == best:
                cpu[i, j] = best_cpu
            elif j == solvers.default:
                cpu[i, j] = best_cpu + spec.margin
            elif timeouts[j]:
                cpu[i, j], solved[i, j] = timeout, False
            else:
                cpu[i, j] = min(best_cpu + spec.margin + slack[j], timeout)

        instances.append(instance)
        default_penalty = 0.0 if best == solvers.default else float(cpu[i, solvers.default] - best_cpu)
        planted.append(PlantedRecord(name, solvers.names[best], default_penalty))

    matrix = RuntimeMatrix.build(solvers, [inst.name for inst in instances], cpu, nodes, solved)
    logger.info(f"Generated {spec.n_instances} synthetic instances (seed {spec.seed})")
    return SynthResult(spec, solvers, tuple(instances), matrix, tuple(planted))


def write_synth(result: SynthResult, directory) -> Path:
    """
    Write ``instances/*.csp``, ``runtimes.csv``, ``solvers.txt`` and ``planted.csv``.

    Returns:
        The output directory
    """
    directory = Path(directory)
    instance_dir = directory / 'instances'
    instance_dir.mkdir(parents=True, exist_ok=True)
    for instance in result.instances:
        (instance_dir / f'{instance.name}.csp').write_text(render_instance(instance), encoding='utf-8')
    with (directory / 'runtimes.csv').open('w', encoding='utf-8', newline='') as stream:
        write_runtime_csv(result.matrix, stream)
    (directory / 'solvers.txt').write_text(render_solvers_file(result.solvers), encoding='utf-8')
    with (directory / 'planted.csv').open('w', encoding='utf-8', newline='') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(PLANTED_HEADER)
        for record in result.planted:
            writer.writerow([record.instance, record.planted_best, format(record.default_penalty, '.17g')])
    return directory
