"""Island-model orchestration of MOEA/D instances.

Islands evolve in isolation for ``gens_per_cycle`` generations, then exchange
migrants once over a fully connected topology (a *cycle*). Migration is
synchronous: every island finishes its cycle before any migrant moves, which
makes a run a pure function of its seed.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .moead import (
    Bounds,
    Evaluate,
    Individual,
    Moead,
    MoeadParams,
    best_index,
    best_tradeoff,
    extract_pareto,
)

log = logging.getLogger(__name__)

GRID_GENS = (10, 20, 30)
GRID_CYCLES = (10, 40, 80)
GRID_POP = (32, 64)
GRID_ISLANDS = (7, 14, 21)


@dataclass(frozen=True)
class ArchipelagoParams:
    n_islands: int = 7
    pop_size: int = 32
    gens_per_cycle: int = 10
    max_cycles: int = 10
    stagnation_cycles: int = 10
    seed: int = 0
    migration: bool = True
    moead: MoeadParams = field(default_factory=MoeadParams)

    def __post_init__(self):
        for name in ("n_islands", "pop_size", "gens_per_cycle", "max_cycles", "stagnation_cycles"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")


@dataclass(frozen=True)
class Problem:
    evaluate: Evaluate
    bounds: Bounds


@dataclass
class RunResult:
    best_individual: Individual
    best_distance: float
    cycles_executed: int
    history: list[tuple[int, float]]
    fronts: list[list[Individual]]
    evaluations: int = 0


class _Counting:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def island_seeds(master_seed: int, n_islands: int) -> list[np.random.SeedSequence]:
    """Independent per-island streams spawned from the master seed."""
    return np.random.SeedSequence(master_seed).spawn(n_islands)


def make_islands(params: ArchipelagoParams, problem: Problem) -> list[Moead]:
    return [
        Moead(problem.evaluate, problem.bounds, params.pop_size, params.moead, seed=s)
        for s in island_seeds(params.seed, params.n_islands)
    ]


def migrate(islands: Sequence[Moead]) -> Sequence[Moead]:
    """Broadcast each island's best trade-off to every other island.

    A receiving island overwrites its individuals farthest from the origin,
    one per migrant, never its own best. Migrants are inserted even when they
    are worse than what they replace.
    """
    if len(islands) < 2:
        return islands
    migrants = [isl.pop.individual(best_index(isl.pop)) for isl in islands]
    for i, isl in enumerate(islands):
        incoming = [m for j, m in enumerate(migrants) if j != i]
        keep = best_index(isl.pop)
        d = np.hypot(isl.pop.f[:, 0], isl.pop.f[:, 1])
        # farthest first; equal distances evict the higher index first
        slots = [k for k in sorted(range(len(d)), key=lambda k: (-d[k], -k)) if k != keep]
        for slot, m in zip(slots, incoming):
            isl.pop.x[slot] = m.genome
            isl.pop.f[slot] = m.fitness
            isl.ctx.update_ideal(np.asarray(m.fitness))
    return islands


def run_cycle(islands: Sequence[Moead], params: ArchipelagoParams) -> Sequence[Moead]:
    for isl in islands:
        isl.evolve(params.gens_per_cycle)
    if params.migration:
        migrate(islands)
    return islands


def _overall_best(islands: Sequence[Moead]) -> Individual:
    return best_tradeoff([isl.best() for isl in islands])


def run_until_converged(
    params: ArchipelagoParams,
    problem: Problem,
    on_cycle: Callable[[int, float], None] | None = None,
) -> RunResult:
    """Run cycles until the budget is spent or the best distance stagnates.

    The run stops after a cycle that makes more than ``stagnation_cycles``
    consecutive cycles without strict improvement of the overall best.
    """
    counter = _Counting(problem.evaluate)
    islands = make_islands(params, Problem(counter, problem.bounds))
    best = _overall_best(islands)
    best_d = math.inf
    history: list[tuple[int, float]] = []
    stagnant = 0
    cycle = 0
    for cycle in range(1, params.max_cycles + 1):
        run_cycle(islands, params)
        current = _overall_best(islands)
        history.append((cycle, current.distance))
        if current.distance < best_d:
            best, best_d = current, current.distance
            stagnant = 0
        else:
            stagnant += 1
        if on_cycle:
            on_cycle(cycle, current.distance)
        log.debug("cycle %d best %.6f (overall %.6f)", cycle, current.distance, best_d)
        if stagnant > params.stagnation_cycles:
            break
    return RunResult(
        best_individual=best,
        best_distance=best.distance,
        cycles_executed=cycle,
        history=history,
        fronts=[extract_pareto(isl.pop) for isl in islands],
        evaluations=counter.calls,
    )


@dataclass(frozen=True)
class GridCell:
    gens: int
    cycles: int
    pop: int
    islands: int


@dataclass
class GridRow:
    cell: GridCell
    distances: list[float]
    best: Individual
    run_bests: list[Individual] = field(default_factory=list)

    @property
    def minimum(self) -> float:
        return min(self.distances)

    @property
    def mean(self) -> float:
        return float(np.mean(self.distances))

    @property
    def maximum(self) -> float:
        return max(self.distances)


def default_grid(
    gens: Iterable[int] = GRID_GENS,
    cycles: Iterable[int] = GRID_CYCLES,
    pops: Iterable[int] = GRID_POP,
    islands: Iterable[int] = GRID_ISLANDS,
) -> list[GridCell]:
    return [GridCell(*combo) for combo in itertools.product(gens, cycles, pops, islands)]


def run_seed(master_seed: int, cell_index: int, repeat: int) -> int:
    return int(np.random.SeedSequence([master_seed, cell_index, repeat]).generate_state(1)[0])


def grid_search(
    cells: Sequence[GridCell],
    repeats: int,
    problem: Problem,
    base: ArchipelagoParams | None = None,
    on_row: Callable[[GridRow], None] | None = None,
) -> list[GridRow]:
    """Run ``repeats`` seeded runs per cell and summarize their best distances."""
    if not cells:
        raise ValueError("empty grid")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    base = base or ArchipelagoParams()
    rows = []
    for ci, cell in enumerate(cells):
        results = []
        for r in range(repeats):
            params = replace(
                base,
                gens_per_cycle=cell.gens,
                max_cycles=cell.cycles,
                pop_size=cell.pop,
                n_islands=cell.islands,
                seed=run_seed(base.seed, ci, r),
            )
            results.append(run_until_converged(params, problem))
        best = best_tradeoff([res.best_individual for res in results])
        row = GridRow(cell, [res.best_distance for res in results], best, [res.best_individual for res in results])
        rows.append(row)
        if on_row:
            on_row(row)
    return rows
