"""Exhaustive reference searches used to check the genetic algorithms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional

from .fitness import PATTERNS, FitnessBreakdown
from .limit import BoundExceeded, exhaustive_min_lambda0, mechanisms_for
from .model import DesignProblem
from .orchestrator import _Runner, default_workers, rank_key

DEFAULT_MAX_CHROMOSOMES = 10_000
_BATCH = 500


def internal_optimum(problem: DesignProblem, genes, max_bits: int) -> dict[str, tuple[float, tuple[int, ...]]]:
    mset = mechanisms_for(genes, problem)
    return {p: exhaustive_min_lambda0(mset, p, max_bits) for p in PATTERNS}


@dataclass
class ExternalOptimum:
    best: FitnessBreakdown
    evaluated: int
    feasible: int


def exhaustive_problem(problem: DesignProblem, max_bits: int) -> DesignProblem:
    return replace(problem, ga=replace(problem.ga, internal_mode="exhaustive", exhaustive_bound=max_bits))


def external_optimum(
    problem: DesignProblem,
    max_bits: int = 24,
    max_chromosomes: int = DEFAULT_MAX_CHROMOSOMES,
    workers: Optional[int] = None,
) -> ExternalOptimum:
    """Best profile chromosome over the whole catalog^(2 N_f) space, exhaustive inside too."""
    space = problem.n_profiles ** problem.n_genes
    if space > max_chromosomes:
        raise BoundExceeded(f"{space} profile chromosomes exceed the cap {max_chromosomes}")
    n_mech = len(mechanisms_for([1] * problem.n_genes, problem))
    if n_mech > max_bits:
        raise BoundExceeded(f"{n_mech} mechanisms exceed the bound {max_bits}")
    runner = _Runner(exhaustive_problem(problem, max_bits), default_workers() if workers is None else workers, None)
    best, feasible, count = None, 0, 0
    genes_iter = itertools.product(range(1, problem.n_profiles + 1), repeat=problem.n_genes)
    try:
        while True:
            batch = list(itertools.islice(genes_iter, _BATCH))
            if not batch:
                break
            for fb in runner.evaluate(batch).values():
                count += 1
                feasible += fb.feasible
                if best is None or rank_key(fb) < rank_key(best):
                    best = fb
            runner.cache.clear()
    finally:
        runner.close()
    return ExternalOptimum(best, count, feasible)
