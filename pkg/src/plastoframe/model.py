"""Problem definition: frame geometry, loads, profile catalog and design settings.

Units used throughout the package: kN, m, kN*m for forces and moments; catalog
section properties keep their tabulated units (cm^2, cm^3, cm^4).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

GRAVITY = 9.81  # m/s^2


class ModelError(ValueError):
    """Raised when a problem definition breaks one of its invariants."""


@dataclass(frozen=True)
class Profile:
    id: int
    name: str
    inertia_cm4: float
    area_cm2: float
    wp_cm3: float
    mp_knm: float

    def __post_init__(self):
        for attr in ("inertia_cm4", "area_cm2", "wp_cm3", "mp_knm"):
            if not getattr(self, attr) > 0:
                raise ModelError(f"profile {self.name!r}: {attr} must be strictly positive")


def plastic_moment(profile: Profile, fy_mpa: float = 235.0) -> float:
    """Plastic moment W_p * f_y in kN*m (cm^3 * MPa = 1e-3 kN*m)."""
    return profile.wp_cm3 * fy_mpa * 1e-3


@dataclass(frozen=True)
class FrameGeometry:
    n_floors: int
    n_columns: int
    bay_length: float
    storey_height: float

    def __post_init__(self):
        if self.n_floors < 1:
            raise ModelError("geometry: n_floors must be >= 1")
        if self.n_columns < 2:
            raise ModelError("geometry: n_columns must be >= 2")
        if not (self.bay_length > 0 and self.storey_height > 0):
            raise ModelError("geometry: bay_length and storey_height must be > 0")

    @property
    def n_bays(self) -> int:
        return self.n_columns - 1


@dataclass(frozen=True)
class LoadSet:
    q: tuple[float, ...]
    forces_a: tuple[float, ...]
    forces_b: tuple[float, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.q):
            raise ModelError("loads: distributed loads q must be >= 0")
        for name, forces in (("mass-proportional", self.forces_a), ("inverse-triangular", self.forces_b)):
            if any(f < 0 for f in forces):
                raise ModelError(f"loads: {name} forces must be >= 0")
            if not any(f > 0 for f in forces):
                raise ModelError(f"loads: at least one {name} force must be > 0")

    def forces(self, pattern: str) -> np.ndarray:
        if pattern == "A":
            return np.asarray(self.forces_a, dtype=float)
        if pattern == "B":
            return np.asarray(self.forces_b, dtype=float)
        raise ValueError(f"unknown load pattern {pattern!r}")


@dataclass(frozen=True)
class FitnessWeights:
    a1: float = 0.2
    a2: float = 0.6
    a3: float = 0.1
    a4: float = 0.1

    def __post_init__(self):
        if min(self.as_tuple()) < 0:
            raise ModelError("weights: every alpha must be >= 0")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)


@dataclass(frozen=True)
class SpectrumParams:
    """Elastic response spectrum shape (pseudo-acceleration in g)."""

    ag_s: float
    f0: float
    tb: float
    tc: float
    td: float
    eta: float = 1.0

    def __post_init__(self):
        if not self.ag_s > 0:
            raise ModelError("spectrum: ag_s must be > 0")
        if not self.f0 > 1:
            raise ModelError("spectrum: f0 must be > 1")
        if not 0 < self.tb < self.tc < self.td:
            raise ModelError("spectrum: corner periods must satisfy 0 < TB < TC < TD")
        if not self.eta > 0:
            raise ModelError("spectrum: eta must be > 0")


@dataclass(frozen=True)
class GaSettings:
    p_ext: int = 100
    n_ext: int = 30
    p_int: int = 100
    g_int: int = 40
    r_int: int = 10
    mutation_ext: float = 0.03
    mutation_int: float = 0.02
    crossover: float = 0.8
    tournament: int = 3
    elite: int = 2
    seed: int = 42
    internal_mode: str = "ga"  # "ga" or "exhaustive"
    exhaustive_bound: int = 24

    def __post_init__(self):
        if self.p_ext < 2 or self.p_int < 2:
            raise ModelError("ga: populations must be >= 2")
        if self.n_ext < 1 or self.g_int < 1 or self.r_int < 1:
            raise ModelError("ga: generations and runs must be >= 1")
        for name in ("mutation_ext", "mutation_int", "crossover"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ModelError(f"ga: {name} must lie in [0, 1]")
        if self.tournament < 1:
            raise ModelError("ga: tournament must be >= 1")
        if not 0 <= self.elite < min(self.p_ext, self.p_int):
            raise ModelError("ga: elite must be >= 0 and smaller than the populations")
        if self.internal_mode not in ("ga", "exhaustive"):
            raise ModelError("ga: internal_mode must be 'ga' or 'exhaustive'")


@dataclass(frozen=True)
class CalibrationParams:
    kappa: float = 0.5
    theta_u: float = 0.03
    beta_drop: float = 0.15
    rho: float = 7850.0
    e_mpa: float = 210000.0
    fy_mpa: float = 235.0

    def __post_init__(self):
        if not 0 < self.kappa <= 1:
            raise ModelError("calibration: kappa must lie in (0, 1]")
        if not (self.theta_u > 0 and self.beta_drop > 0):
            raise ModelError("calibration: theta_u and beta_drop must be > 0")
        if not (self.rho > 0 and self.e_mpa > 0 and self.fy_mpa > 0):
            raise ModelError("calibration: rho, E and fy must be > 0")


@dataclass(frozen=True)
class DesignProblem:
    geometry: FrameGeometry
    loads: LoadSet
    catalog: tuple[Profile, ...]
    spectrum: SpectrumParams
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    ga: GaSettings = field(default_factory=GaSettings)
    calibration: CalibrationParams = field(default_factory=CalibrationParams)

    def __post_init__(self):
        nf = self.geometry.n_floors
        for name in ("q", "forces_a", "forces_b"):
            if len(getattr(self.loads, name)) != nf:
                raise ModelError(f"loads: {name} must have one entry per floor ({nf})")
        if not self.catalog:
            raise ModelError("catalog: at least one profile is required")
        ids = [p.id for p in self.catalog]
        if ids != list(range(1, len(ids) + 1)):
            raise ModelError("catalog: ids must be 1..n in order")

    @property
    def n_genes(self) -> int:
        return 2 * self.geometry.n_floors

    @property
    def n_profiles(self) -> int:
        return len(self.catalog)

    def profile(self, gene: int) -> Profile:
        return self.catalog[gene - 1]

    def check_chromosome(self, genes: Sequence[int]) -> tuple[int, ...]:
        genes = tuple(int(g) for g in genes)
        if len(genes) != self.n_genes:
            raise ModelError(f"chromosome must have exactly 2*n_floors = {self.n_genes} genes, got {len(genes)}")
        for g in genes:
            if not 1 <= g <= self.n_profiles:
                raise ModelError(f"gene {g} outside catalog index range [1, {self.n_profiles}]")
        return genes

    def floor_gravity(self) -> np.ndarray:
        """Total vertical load per floor, kN."""
        g = self.geometry
        return np.asarray(self.loads.q, dtype=float) * g.n_bays * g.bay_length

    def floor_masses(self) -> np.ndarray:
        """Seismic floor masses in tonnes, taken from the tributary gravity loads."""
        return self.floor_gravity() / GRAVITY


def column_genes(genes: Sequence[int]) -> tuple[int, ...]:
    return tuple(genes[0::2])


def beam_genes(genes: Sequence[int]) -> tuple[int, ...]:
    return tuple(genes[1::2])


def area_length(genes: Sequence[int], problem: DesignProblem) -> float:
    """Sum of A * member length over all members, in cm^2*m."""
    geo = problem.geometry
    col_len = geo.n_columns * geo.storey_height
    beam_len = geo.n_bays * geo.bay_length
    total = 0.0
    for c, b in zip(column_genes(genes), beam_genes(genes)):
        total += problem.profile(c).area_cm2 * col_len
        total += problem.profile(b).area_cm2 * beam_len
    return total


def frame_mass(genes: Sequence[int], problem: DesignProblem) -> float:
    """Steel mass of the frame in kg (centerline lengths, no joint deductions)."""
    return problem.calibration.rho * area_length(genes, problem) * 1e-4


def max_mass(problem: DesignProblem) -> float:
    biggest = max(range(1, problem.n_profiles + 1), key=lambda i: problem.profile(i).area_cm2)
    return frame_mass([biggest] * problem.n_genes, problem)
