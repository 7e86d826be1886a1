"""Bi-objective MOEA/D with Tchebycheff decomposition.

Variation follows the MOEA/D-DE scheme: DE/rand/1 on a mating pool drawn from
the neighborhood (probability ``realb``) or the whole population, followed by
polynomial mutation. With ``preserve_diversity`` each offspring replaces at
most ``limit`` subproblems; without it mating is always local and
replacement is unbounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Evaluate = Callable[[np.ndarray], Sequence[float]]


@dataclass(frozen=True)
class MoeadParams:
    neighbors: int = 20
    cr: float = 1.0
    f: float = 0.5
    eta_m: float = 20.0
    realb: float = 0.9
    limit: int = 2
    preserve_diversity: bool = True

    def __post_init__(self):
        if not 0.0 <= self.cr <= 1.0 or not 0.0 <= self.realb <= 1.0:
            raise ValueError("cr and realb must lie in [0, 1]")
        if not (self.f > 0 and self.eta_m > 0):
            raise ValueError("f and eta_m must be positive")
        if self.limit < 1 or self.neighbors < 1:
            raise ValueError("limit and neighbors must be >= 1")


@dataclass(frozen=True)
class Individual:
    genome: tuple[float, ...]
    fitness: tuple[float, float]

    @property
    def distance(self) -> float:
        return math.hypot(*self.fitness)


@dataclass
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape or np.any(self.lower > self.upper):
            raise ValueError("bounds must have equal shape and lower <= upper")

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass
class Population:
    x: np.ndarray  # (n, dim)
    f: np.ndarray  # (n, 2)

    def __len__(self):
        return len(self.x)

    def copy(self) -> "Population":
        return Population(self.x.copy(), self.f.copy())

    def individual(self, i: int) -> Individual:
        return Individual(tuple(float(v) for v in self.x[i]), (float(self.f[i, 0]), float(self.f[i, 1])))

    def individuals(self) -> list[Individual]:
        return [self.individual(i) for i in range(len(self))]


@dataclass
class DecompositionContext:
    weights: np.ndarray  # (n, 2)
    neighborhoods: np.ndarray  # (n, T)
    ideal_point: np.ndarray  # (2,)
    replacement_log: list[int] = field(default_factory=list)

    @classmethod
    def build(cls, pop: Population, neighbors: int) -> "DecompositionContext":
        w = generate_weights(len(pop))
        return cls(w, neighborhoods(w, neighbors), pop.f.min(axis=0).copy())

    def update_ideal(self, f) -> None:
        np.minimum(self.ideal_point, f, out=self.ideal_point)


def generate_weights(n: int) -> np.ndarray:
    """Uniform grid on the 2-simplex, endpoints included."""
    if n < 2:
        raise ValueError("need at least 2 weight vectors")
    i = np.arange(n, dtype=float)
    first = i / (n - 1)
    return np.column_stack([first, 1.0 - first])


def neighborhoods(weights: np.ndarray, t: int) -> np.ndarray:
    """Indices of the ``t`` closest weight vectors of each weight (itself first)."""
    t = min(t, len(weights))
    d = np.linalg.norm(weights[:, None, :] - weights[None, :, :], axis=-1)
    return np.argsort(d, axis=1, kind="stable")[:, :t]


def tchebycheff(f, lam, z_star) -> float:
    f, lam, z_star = np.asarray(f), np.asarray(lam), np.asarray(z_star)
    return float(np.max(lam * np.abs(f - z_star)))


def polynomial_mutation(x: np.ndarray, bounds: Bounds, eta: float, rate: float, rng: np.random.Generator) -> np.ndarray:
    y = x.copy()
    lo, hi = bounds.lower, bounds.upper
    mut_pow = 1.0 / (eta + 1.0)
    for j in range(y.size):
        if rng.random() > rate or hi[j] == lo[j]:
            continue
        span = hi[j] - lo[j]
        d1 = (y[j] - lo[j]) / span
        d2 = (hi[j] - y[j]) / span
        r = rng.random()
        if r <= 0.5:
            val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1) ** (eta + 1.0)
            dq = val**mut_pow - 1.0
        else:
            val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2) ** (eta + 1.0)
            dq = 1.0 - val**mut_pow
        y[j] = min(max(y[j] + dq * span, lo[j]), hi[j])
    return y


def de_variation(
    pop: Population, n: int, parents: Sequence[int], bounds: Bounds, params: MoeadParams, rng: np.random.Generator
) -> np.ndarray:
    """DE/rand/1 around subproblem ``n`` with in-bounds repair toward the base vector."""
    base = pop.x[n]
    a, b = pop.x[parents[0]], pop.x[parents[1]]
    child = base.copy()
    for j in range(base.size):
        if rng.random() < params.cr:
            v = base[j] + params.f * (a[j] - b[j])
            if v < bounds.lower[j]:
                v = bounds.lower[j] + rng.random() * (base[j] - bounds.lower[j])
            if v > bounds.upper[j]:
                v = bounds.upper[j] - rng.random() * (bounds.upper[j] - base[j])
            child[j] = v
    return child


def random_population(evaluate: Evaluate, bounds: Bounds, n: int, rng: np.random.Generator) -> Population:
    x = bounds.lower + rng.random((n, bounds.dim)) * (bounds.upper - bounds.lower)
    f = np.array([evaluate(xi) for xi in x], dtype=float)
    return Population(x, f)


def evolve_generation(
    pop: Population,
    ctx: DecompositionContext,
    params: MoeadParams,
    evaluate: Evaluate,
    bounds: Bounds,
    rng: np.random.Generator,
) -> Population:
    """One MOEA/D generation: every subproblem produces one offspring.

    Returns a new population; ``ctx`` keeps the updated ideal point and the
    per-offspring replacement counts of this generation.
    """
    pop = pop.copy()
    size = len(pop)
    everyone = np.arange(size)
    rate = 1.0 / bounds.dim
    ctx.replacement_log = []
    for n in rng.permutation(size):
        local = not params.preserve_diversity or rng.random() < params.realb
        pool = ctx.neighborhoods[n] if local else everyone
        if len(pool) >= 2:
            parents = rng.choice(pool, size=2, replace=False)
        else:
            parents = rng.choice(everyone, size=2, replace=size < 2)
        child = de_variation(pop, n, parents, bounds, params, rng)
        child = polynomial_mutation(child, bounds, params.eta_m, rate, rng)
        fc = np.asarray(evaluate(child), dtype=float)
        ctx.update_ideal(fc)

        order = rng.permutation(pool)
        w = ctx.weights[order]
        g_child = np.max(w * np.abs(fc - ctx.ideal_point), axis=1)
        g_old = np.max(w * np.abs(pop.f[order] - ctx.ideal_point), axis=1)
        replaced = 0
        for k, better in zip(order, g_child < g_old):
            if better:
                pop.x[k] = child
                pop.f[k] = fc
                replaced += 1
                if params.preserve_diversity and replaced >= params.limit:
                    break
        ctx.replacement_log.append(replaced)
    return pop


def non_dominated_mask(f: np.ndarray) -> np.ndarray:
    """Mask of points not dominated by any other point (minimization, 2 objectives)."""
    f = np.asarray(f, dtype=float)
    mask = np.zeros(len(f), dtype=bool)
    if len(f) == 0:
        return mask
    order = np.lexsort((f[:, 1], f[:, 0]))
    best_prev = math.inf  # smallest f2 among strictly smaller f1
    i = 0
    while i < len(order):
        j = i
        f1 = f[order[i], 0]
        while j < len(order) and f[order[j], 0] == f1:
            j += 1
        group = order[i:j]
        m = f[group[0], 1]  # group sorted by f2
        if m < best_prev:
            mask[group[f[group, 1] == m]] = True
        best_prev = min(best_prev, m)
        i = j
    return mask


def extract_pareto(pop: Population) -> list[Individual]:
    return [pop.individual(i) for i in np.flatnonzero(non_dominated_mask(pop.f))]


def best_tradeoff(front: Sequence[Individual]) -> Individual:
    """Member closest to the origin; ties go to the lower first objective, then the smaller genome."""
    if not front:
        raise ValueError("empty front")
    return min(front, key=lambda ind: (ind.distance, ind.fitness[0], ind.genome))


def best_index(pop: Population) -> int:
    """Index of the population's best trade-off (same ordering as :func:`best_tradeoff`)."""
    d = np.hypot(pop.f[:, 0], pop.f[:, 1])
    return min(range(len(pop)), key=lambda i: (d[i], pop.f[i, 0], tuple(pop.x[i])))


class Moead:
    """A single MOEA/D instance owning its population, context and random stream."""

    def __init__(self, evaluate: Evaluate, bounds: Bounds, pop_size: int, params: MoeadParams | None = None, seed=None):
        self.evaluate = evaluate
        self.bounds = bounds
        self.params = params or MoeadParams()
        self.rng = np.random.default_rng(seed)
        self.pop = random_population(evaluate, bounds, pop_size, self.rng)
        self.ctx = DecompositionContext.build(self.pop, self.params.neighbors)
        self.generations = 0

    def evolve(self, gens: int = 1) -> Population:
        for _ in range(gens):
            self.pop = evolve_generation(self.pop, self.ctx, self.params, self.evaluate, self.bounds, self.rng)
            self.generations += 1
        return self.pop

    def front(self) -> list[Individual]:
        return extract_pareto(self.pop)

    def best(self) -> Individual:
        return self.pop.individual(best_index(self.pop))
