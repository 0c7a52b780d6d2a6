import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import with_ga
from plastoframe.fitness import (
    assemble,
    best_of_runs,
    evaluate_profile_chromosome,
    fitness_f1,
    fitness_f2,
    fitness_f3,
    fitness_f4,
    internal_search,
    weighted_fitness,
)
from plastoframe.ga import Operators, derive_rng, evolve, random_population, ranking, run_ga, run_internal_ga
from plastoframe.limit import exhaustive_min_lambda0, mechanisms_for
from plastoframe.model import frame_mass, max_mass


def test_f1_unit_safety_is_zero():
    assert fitness_f1(1.0, 1.0) == 0.0


def test_f1_approaches_one():
    assert fitness_f1(1e9, 1e9) == pytest.approx(1.0)


def test_f1_table_value():
    assert round(fitness_f1(2.167, 1.945), 3) == 0.512


def test_f1_rejects_non_positive():
    with pytest.raises(ValueError):
        fitness_f1(0.0, 1.0)


def test_f2_bounds(two_storey):
    top = max_mass(two_storey)
    assert fitness_f2(top, top) == 0.0
    assert fitness_f2(top / 4, top) == 0.75
    light = frame_mass((1, 1, 1, 1), two_storey)
    assert 0 < fitness_f2(light, top) < 1


def test_f3_counts_active_mechanisms():
    a = [1, 1, 1, 1, 1, 1, 0, 0, 0, 0]
    b = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1]
    assert fitness_f3(a, b) == 0.6
    assert fitness_f3([1] * 10, [1] * 10) == 1.0
    with pytest.raises(ValueError):
        fitness_f3([1] * 10, [1] * 9)


@pytest.mark.parametrize(
    "genes, expected",
    [
        ((5, 5, 3, 4), 1.0),
        ((5, 3, 5, 3, 5, 2, 3, 2, 1, 1), 1.0),
        ((3, 4, 5, 4), -1.0),
        ((4, 1, 4, 1), 1.0),
        ((2, 1, 3, 1, 1, 1), 0.0),
        ((7, 7), 1.0),
    ],
)
def test_f4_column_hierarchy(genes, expected):
    assert fitness_f4(genes) == expected


def test_weighted_sum():
    assert weighted_fitness((0.5, 0.4, 0.3, 1.0), (0.2, 0.6, 0.1, 0.1)) == pytest.approx(
        0.1 + 0.24 + 0.03 + 0.1
    )


def test_gravity_collapse_is_infeasible(two_storey):
    heavy = dataclasses.replace(
        two_storey, loads=dataclasses.replace(two_storey.loads, q=(500.0, 50.0))
    )
    fb = assemble((1, 1, 1, 1), heavy, {"A": (0.0, (1,) * 10), "B": (0.0, (1,) * 10)})
    assert fb.fitness == -math.inf
    assert not fb.feasible
    assert "gravity" in fb.reason


def test_ranking_tiebreaks():
    pop = np.array([[3, 1], [1, 2], [2, 2], [1, 1]])
    fit = np.array([1.0, 1.0, 2.0, 1.0])
    assert list(ranking(pop, fit)) == [2, 3, 1, 0]
    mass = np.array([0.0, 5.0, 0.0, 9.0])
    assert list(ranking(pop, fit, mass)) == [2, 0, 1, 3]


def test_evolve_keeps_elite_and_bounds():
    ops = Operators(1, 10, elite=2, mutation=0.5)
    rng = derive_rng(7)
    pop = random_population(rng, 9, 4, ops)
    fit = pop.sum(axis=1).astype(float)
    nxt = evolve(pop, fit, rng, ops)
    assert nxt.shape == pop.shape
    order = ranking(pop, fit)
    assert np.array_equal(nxt[:2], pop[order[:2]])
    assert nxt.min() >= 1 and nxt.max() <= 10


def test_elitism_keeps_best_non_decreasing():
    ops = Operators(0, 1, mutation=0.2)
    rng = derive_rng(3)
    pop = random_population(rng, 20, 12, ops)
    weights = np.linspace(-1, 1, 12)
    best = []
    for _ in range(30):
        fit = pop @ weights
        best.append(fit.max())
        pop = evolve(pop, fit, rng, ops)
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(0.01, 100.0), seed=st.integers(0, 2**32 - 1))
def test_positive_scaling_does_not_change_evolution(alpha, seed):
    ops = Operators(1, 10)
    pop = random_population(derive_rng(seed), 15, 6, ops)
    fit = np.sin(pop.sum(axis=1)).astype(float)
    a = evolve(pop, fit, derive_rng(seed, 1), ops)
    b = evolve(pop, alpha * fit, derive_rng(seed, 1), ops)
    assert np.array_equal(a, b)


def test_run_ga_deterministic_and_solves_onemax():
    ops = Operators(0, 1, mutation=0.05)
    count = lambda pop: pop.sum(axis=1)
    r1 = run_ga(count, 16, ops, 40, 40, derive_rng(11))
    r2 = run_ga(count, 16, ops, 40, 40, derive_rng(11))
    assert np.array_equal(r1.best, r2.best) and r1.history == r2.history
    assert r1.best_fitness == 16
    assert all(b >= a for a, b in zip(r1.history, r1.history[1:]))


def test_internal_ga_single_mechanism_portal(portal):
    ms = mechanisms_for((5, 5), portal)
    value, bits = run_internal_ga(ms, "A", portal.ga, (0, 0, 5, 5))
    assert (value, bits) == exhaustive_min_lambda0(ms, "A")


@pytest.mark.parametrize("genes", [(5, 5, 3, 4), (4, 4, 3, 4), (2, 7, 9, 3), (10, 1, 10, 1)])
@pytest.mark.parametrize("pattern", ["A", "B"])
def test_internal_ga_reaches_exhaustive_minimum(two_storey, genes, pattern):
    ms = mechanisms_for(genes, two_storey)
    runs = [internal_search(genes, two_storey, pattern, r) for r in range(two_storey.ga.r_int)]
    value, _ = best_of_runs(runs)
    assert value == pytest.approx(exhaustive_min_lambda0(ms, pattern)[0], rel=1e-12)


def test_internal_search_is_pure(two_storey):
    a = internal_search((5, 5, 3, 4), two_storey, "A", 3)
    b = internal_search((5, 5, 3, 4), two_storey, "A", 3)
    assert a == b


def test_best_of_runs_ties_lowest_bits():
    assert best_of_runs([(0.5, (1, 0)), (0.5, (0, 1)), (0.7, (0, 0))]) == (0.5, (0, 1))


def test_exhaustive_mode_evaluation(two_storey):
    ex = with_ga(two_storey, internal_mode="exhaustive")
    fb = evaluate_profile_chromosome((5, 5, 3, 4), ex)
    ga = evaluate_profile_chromosome((5, 5, 3, 4), two_storey)
    assert fb.lambda0_a == pytest.approx(ga.lambda0_a)
    assert fb.feasible and fb.fitness == pytest.approx(ga.fitness)


def test_single_profile_catalog(two_storey):
    one = dataclasses.replace(two_storey, catalog=two_storey.catalog[:1])
    one = with_ga(one, internal_mode="exhaustive")
    fb = evaluate_profile_chromosome((1, 1, 1, 1), one)
    assert fb.f2 == 0.0
    assert fb.f4 == 1.0
