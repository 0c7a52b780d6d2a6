"""Linear elastic lateral analysis of a regular plane frame.

Members are flexible in bending only: beams and columns are axially rigid and
shear deformation is ignored, so each floor has one horizontal translation and
each joint one rotation. Column bases are clamped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import DesignProblem, FrameGeometry, Profile, beam_genes, column_genes


@dataclass(frozen=True)
class FrameStiffnessModel:
    geometry: FrameGeometry
    matrix: np.ndarray

    @property
    def n_dof(self) -> int:
        return self.matrix.shape[0]

    def sway_dof(self, floor: int) -> int:
        """DOF index of the translation of floor 1..N_f."""
        return floor - 1

    def rotation_dof(self, column: int, floor: int) -> int:
        return self.geometry.n_floors + (floor - 1) * self.geometry.n_columns + column


@dataclass(frozen=True)
class LateralResponse:
    floor_displacements: np.ndarray  # m
    top_displacement: float  # m
    stiffness: float  # kN/m, total force over top displacement


def _column_matrix(ei: float, h: float) -> np.ndarray:
    # DOF order (u_bottom, rot_bottom, u_top, rot_top), horizontal translations
    return ei / h**3 * np.array([
        [12.0, -6.0 * h, -12.0, -6.0 * h],
        [-6.0 * h, 4.0 * h * h, 6.0 * h, 2.0 * h * h],
        [-12.0, 6.0 * h, 12.0, 6.0 * h],
        [-6.0 * h, 2.0 * h * h, 6.0 * h, 4.0 * h * h],
    ])


def assemble(
    geometry: FrameGeometry,
    chromosome: Sequence[int],
    e_mpa: float,
    catalog: Sequence[Profile],
    beam_scale: float = 1.0,
    column_scale: float = 1.0,
) -> FrameStiffnessModel:
    """Assemble the constrained stiffness matrix (kN, m, rad).

    ``beam_scale`` and ``column_scale`` multiply the second moments of area; they
    exist for limit-case checks (rigid beams, vanishing beams).
    """
    nf, nc = geometry.n_floors, geometry.n_columns
    h, span = geometry.storey_height, geometry.bay_length
    e_knm2 = e_mpa * 1e3
    n = nf + nf * nc
    k = np.zeros((n, n))
    model = FrameStiffnessModel(geometry, k)

    cols = column_genes(chromosome)
    beams = beam_genes(chromosome)
    for s in range(1, nf + 1):
        ei = e_knm2 * catalog[cols[s - 1] - 1].inertia_cm4 * 1e-8 * column_scale
        ke = _column_matrix(ei, h)
        for j in range(nc):
            # -1 marks a restrained base DOF
            dofs = [
                model.sway_dof(s - 1) if s > 1 else -1,
                model.rotation_dof(j, s - 1) if s > 1 else -1,
                model.sway_dof(s),
                model.rotation_dof(j, s),
            ]
            _scatter(k, ke, dofs)
        ei_b = e_knm2 * catalog[beams[s - 1] - 1].inertia_cm4 * 1e-8 * beam_scale
        kb = ei_b / span * np.array([[4.0, 2.0], [2.0, 4.0]])
        for b in range(nc - 1):
            _scatter(k, kb, [model.rotation_dof(b, s), model.rotation_dof(b + 1, s)])
    return model


def _scatter(k: np.ndarray, ke: np.ndarray, dofs: list[int]) -> None:
    for a, da in enumerate(dofs):
        if da < 0:
            continue
        for b, db in enumerate(dofs):
            if db >= 0:
                k[da, db] += ke[a, b]


def solve(model: FrameStiffnessModel, forces: Sequence[float]) -> np.ndarray:
    """Full DOF vector for horizontal floor forces (kN)."""
    rhs = np.zeros(model.n_dof)
    rhs[: model.geometry.n_floors] = forces
    return np.linalg.solve(model.matrix, rhs)


def lateral_response(model: FrameStiffnessModel, forces: Sequence[float]) -> LateralResponse:
    forces = np.asarray(forces, dtype=float)
    if not np.any(forces):
        raise ValueError("lateral_response needs a nonzero force vector")
    u = solve(model, forces)[: model.geometry.n_floors]
    top = float(u[-1])
    return LateralResponse(u, top, float(forces.sum()) / top)


def frame_response(genes: Sequence[int], problem: DesignProblem, pattern: str) -> LateralResponse:
    model = assemble(problem.geometry, genes, problem.calibration.e_mpa, problem.catalog)
    return lateral_response(model, problem.loads.forces(pattern))
