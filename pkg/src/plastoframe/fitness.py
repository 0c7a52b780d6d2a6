"""Fitness of a profile chromosome: seismic safety, mass, failure mode, hierarchy."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .elastic import frame_response
from .ga import run_internal_ga
from .limit import (
    LimitAnalysisError,
    MechanismSet,
    combine,
    exhaustive_min_lambda0,
    gravity_collapse,
    mechanisms_for,
    second_order_slope,
)
from .model import DesignProblem, column_genes, frame_mass, max_mass
from .seismic import (
    AssessmentError,
    SafetyAssessment,
    build_capacity,
    demand_displacement,
    safety_factor,
    sdof_transform,
)

PATTERNS = ("A", "B")
INFEASIBLE = -math.inf


def fitness_f1(sf_a: float, sf_b: float) -> float:
    if sf_a <= 0 or sf_b <= 0:
        raise ValueError("safety factors must be positive")
    return 1.0 - 0.5 * (1.0 / sf_a + 1.0 / sf_b)


def fitness_f2(mass: float, max_mass: float) -> float:
    if not 0 < mass <= max_mass * (1 + 1e-12):
        raise ValueError("mass must lie in (0, max_mass]")
    return 1.0 - mass / max_mass


def fitness_f3(bits_a: Sequence[int], bits_b: Sequence[int], n: Optional[int] = None) -> float:
    n = len(bits_a) if n is None else n
    if len(bits_a) != n or len(bits_b) != n:
        raise ValueError("mechanism chromosomes must both have length N")
    return (sum(bits_a) + sum(bits_b)) / (2.0 * n)


def fitness_f4(genes: Sequence[int]) -> float:
    """Column hierarchy: +1 per storey whose column profile is not larger than the one below."""
    cols = column_genes(genes)
    if len(cols) < 2:
        return 1.0
    steps = [1.0 if lower >= upper else -1.0 for lower, upper in zip(cols[:-1], cols[1:])]
    return sum(steps) / (len(cols) - 1)


def weighted_fitness(components: Sequence[float], weights: Sequence[float]) -> float:
    return float(sum(a * f for a, f in zip(weights, components)))


@dataclass
class FitnessBreakdown:
    genes: tuple[int, ...]
    fitness: float
    f1: float
    f2: float
    f3: float
    f4: float
    mass: float
    sf_a: float = math.nan
    sf_b: float = math.nan
    lambda0_a: float = math.nan
    lambda0_b: float = math.nan
    lambda_c_a: float = math.nan
    lambda_c_b: float = math.nan
    gamma_a: float = math.nan
    gamma_b: float = math.nan
    bits_a: tuple[int, ...] = ()
    bits_b: tuple[int, ...] = ()
    reason: str = ""
    assessments: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def feasible(self) -> bool:
        return self.fitness > INFEASIBLE

    def to_record(self) -> dict:
        out = asdict(self)
        out.pop("assessments")
        out["genes"] = list(self.genes)
        out["bits_a"] = list(self.bits_a)
        out["bits_b"] = list(self.bits_b)
        return {k: (_encode(v) if isinstance(v, float) else v) for k, v in out.items()}

    @classmethod
    def from_record(cls, rec: dict) -> "FitnessBreakdown":
        rec = {k: (_decode(v) if k not in ("genes", "bits_a", "bits_b", "reason") else v) for k, v in rec.items()}
        rec["genes"] = tuple(rec["genes"])
        rec["bits_a"] = tuple(rec["bits_a"])
        rec["bits_b"] = tuple(rec["bits_b"])
        return cls(**rec)


def _encode(v: float):
    # JSON has no inf/nan literals
    if math.isfinite(v):
        return v
    return str(v)


def _decode(v):
    return float(v) if isinstance(v, str) else v


def internal_seed_key(genes: Sequence[int], pattern: str, run: int) -> tuple[int, ...]:
    return (PATTERNS.index(pattern), run, *genes)


def internal_search(genes: Sequence[int], problem: DesignProblem, pattern: str, run: int) -> tuple[float, tuple[int, ...]]:
    """One unit of internal work: a GA run, or the exhaustive search in oracle mode."""
    mset = mechanisms_for(genes, problem)
    if problem.ga.internal_mode == "exhaustive":
        return exhaustive_min_lambda0(mset, pattern, problem.ga.exhaustive_bound)
    return run_internal_ga(mset, pattern, problem.ga, internal_seed_key(genes, pattern, run))


def internal_runs(problem: DesignProblem) -> int:
    return 1 if problem.ga.internal_mode == "exhaustive" else problem.ga.r_int


def best_of_runs(results: Sequence[tuple[float, Sequence[int]]]) -> tuple[float, tuple[int, ...]]:
    """Minimum multiplier over runs; equal values resolve to the lowest bit string."""
    return min(((float(v), tuple(b)) for v, b in results), key=lambda r: (r[0], r[1]))


def assess_pattern(
    genes: Sequence[int],
    problem: DesignProblem,
    mset: MechanismSet,
    pattern: str,
    lam0: float,
    bits: Sequence[int],
) -> SafetyAssessment:
    cm = combine(mset, bits, pattern)
    gamma, _ = second_order_slope(cm, mset)
    response = frame_response(genes, problem, pattern)
    forces = problem.loads.forces(pattern)
    curve = build_capacity(lam0, gamma, response.stiffness, problem.calibration, cm, float(forces.sum()))
    shape = response.floor_displacements / response.top_displacement
    sdof = sdof_transform(curve, problem.floor_masses(), shape)
    d_max = demand_displacement(sdof, problem.spectrum)
    return SafetyAssessment(pattern, curve, sdof, d_max, safety_factor(sdof.d_cu, d_max))


def assemble(
    genes: Sequence[int],
    problem: DesignProblem,
    internal: dict[str, tuple[float, Sequence[int]]],
) -> FitnessBreakdown:
    """Combine the per-pattern internal optima into the fitness breakdown."""
    genes = tuple(int(g) for g in genes)
    mass = frame_mass(genes, problem)
    f2 = fitness_f2(mass, max_mass(problem))
    f4 = fitness_f4(genes)
    mset = mechanisms_for(genes, problem)
    (lam_a, bits_a), (lam_b, bits_b) = (internal[p] for p in PATTERNS)
    f3 = fitness_f3(bits_a, bits_b, len(mset))
    out = FitnessBreakdown(
        genes, INFEASIBLE, math.nan, f2, f3, f4, mass,
        lambda0_a=lam_a, lambda0_b=lam_b, bits_a=tuple(bits_a), bits_b=tuple(bits_b),
    )
    if gravity_collapse(mset) or min(lam_a, lam_b) <= 0:
        out.reason = "gravity collapse"
        return out
    try:
        assessments = {p: assess_pattern(genes, problem, mset, p, *internal[p]) for p in PATTERNS}
    except (AssessmentError, LimitAnalysisError, np.linalg.LinAlgError) as err:
        out.reason = f"assessment failed: {err}"
        return out
    a, b = assessments["A"], assessments["B"]
    out.assessments = assessments
    out.sf_a, out.sf_b = a.sf, b.sf
    out.lambda_c_a, out.lambda_c_b = a.curve.lambda_c, b.curve.lambda_c
    out.gamma_a, out.gamma_b = a.curve.gamma, b.curve.gamma
    if a.sf <= 0 or b.sf <= 0:
        out.reason = "non-positive safety factor"
        return out
    out.f1 = fitness_f1(a.sf, b.sf)
    out.fitness = weighted_fitness((out.f1, f2, f3, f4), problem.weights.as_tuple())
    return out


def evaluate_profile_chromosome(genes: Sequence[int], problem: DesignProblem) -> FitnessBreakdown:
    """Full nested evaluation of one profile chromosome, serially."""
    genes = problem.check_chromosome(genes)
    runs = internal_runs(problem)
    internal = {
        p: best_of_runs([internal_search(genes, problem, p, r) for r in range(runs)]) for p in PATTERNS
    }
    return assemble(genes, problem, internal)
