"""Seeded genetic algorithm over bounded integer genomes (maximization).

Tournament selection, single-point crossover, per-gene uniform mutation and
elitism. Ties in fitness are broken by an optional secondary key (lower wins)
and then by the lexicographically smaller genome, so runs are reproducible
bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .limit import MechanismSet, lambda0_batch

# spawn-key tags for deriving independent streams from one master seed
STREAM_EXTERNAL = 1
STREAM_INTERNAL = 2


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


@dataclass(frozen=True)
class Operators:
    low: int
    high: int  # inclusive
    crossover: float = 0.8
    mutation: float = 0.03
    tournament: int = 3
    elite: int = 2


def ranking(population: np.ndarray, fitness: np.ndarray, tiebreak: Optional[np.ndarray] = None) -> np.ndarray:
    """Indices from best to worst."""
    keys = [population[:, j] for j in range(population.shape[1] - 1, -1, -1)]
    if tiebreak is not None:
        keys.append(tiebreak)
    keys.append(-fitness)
    return np.lexsort(keys)


def random_population(rng: np.random.Generator, size: int, n_genes: int, ops: Operators) -> np.ndarray:
    return rng.integers(ops.low, ops.high + 1, size=(size, n_genes))


def evolve(
    population: np.ndarray,
    fitness: np.ndarray,
    rng: np.random.Generator,
    ops: Operators,
    tiebreak: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Produce the next generation (same size) from a scored population."""
    size, n_genes = population.shape
    order = ranking(population, fitness, tiebreak)
    rank = np.empty(size, dtype=int)
    rank[order] = np.arange(size)

    n_children = size - ops.elite
    n_pairs = (n_children + 1) // 2
    picks = rng.integers(0, size, size=(2 * n_pairs, ops.tournament))
    winners = picks[np.arange(2 * n_pairs), np.argmin(rank[picks], axis=1)]
    a, b = population[winners[0::2]], population[winners[1::2]]
    if n_genes > 1:
        do_cross = rng.random(n_pairs) < ops.crossover
        cuts = rng.integers(1, n_genes, size=n_pairs)
        swap = (np.arange(n_genes)[None, :] >= cuts[:, None]) & do_cross[:, None]
        a, b = np.where(swap, b, a), np.where(swap, a, b)
    offspring = np.stack([a, b], axis=1).reshape(2 * n_pairs, n_genes)[:n_children]
    mutate = rng.random(offspring.shape) < ops.mutation
    fresh = rng.integers(ops.low, ops.high + 1, size=offspring.shape)
    offspring = np.where(mutate, fresh, offspring)
    return np.concatenate([population[order[: ops.elite]], offspring])


@dataclass
class RunResult:
    best: np.ndarray
    best_fitness: float
    history: list[float]


def run_ga(
    evaluate: Callable[[np.ndarray], np.ndarray],
    n_genes: int,
    ops: Operators,
    pop_size: int,
    generations: int,
    rng: np.random.Generator,
) -> RunResult:
    """Plain generational loop with a vectorized batch evaluator."""
    pop = random_population(rng, pop_size, n_genes, ops)
    best, best_fit, history = None, -np.inf, []
    for gen in range(generations):
        fit = np.asarray(evaluate(pop), dtype=float)
        i = int(ranking(pop, fit)[0])
        if best is None or fit[i] > best_fit or (fit[i] == best_fit and tuple(pop[i]) < tuple(best)):
            best, best_fit = pop[i].copy(), float(fit[i])
        history.append(best_fit)
        if gen + 1 < generations:
            pop = evolve(pop, fit, rng, ops)
    return RunResult(best, best_fit, history)


def internal_operators(settings) -> Operators:
    """Binary operators for mechanism bit strings; `settings` is a GaSettings."""
    return Operators(0, 1, settings.crossover, settings.mutation_int, settings.tournament, settings.elite)


def run_internal_ga(
    mset: MechanismSet, pattern: str, settings, seed_key: Sequence[int]
) -> tuple[float, tuple[int, ...]]:
    """One internal GA run minimizing the collapse multiplier over mechanism bit strings."""
    rng = derive_rng(settings.seed, STREAM_INTERNAL, *seed_key)
    ops = internal_operators(settings)
    result = run_ga(
        lambda pop: -lambda0_batch(mset, pop, pattern), len(mset), ops, settings.p_int, settings.g_int, rng
    )
    return -result.best_fitness, tuple(int(b) for b in result.best)
