"""Kinematic limit analysis by combination of elementary mechanisms.

Three families of elementary mechanisms are generated for a regular frame:
beam mechanisms (three hinges in one beam), sway mechanisms (hinges at both
ends of every column of one storey) and joint mechanisms (rigid rotation of a
joint with at least three framing members). A combined mechanism is the sum of
the selected elementary ones; hinge rotations add with sign, so rotations at
shared sections can cancel.

Hinge rotations are relative rotations "member minus node", counterclockwise
positive. Sway mechanisms move floors in the positive x direction and joint
mechanisms rotate their joint clockwise, so that combining a sway with a joint
moves the column-top hinge into the other members framing into that joint.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .model import DesignProblem, FrameGeometry, LoadSet, Profile, beam_genes, column_genes

W_EXT_H_EPS = 1e-9
DEFAULT_EXHAUSTIVE_BOUND = 24
_CHUNK = 1 << 15

COLUMN_BOTTOM, COLUMN_TOP = "column-bottom", "column-top"
BEAM_LEFT, BEAM_MID, BEAM_RIGHT = "beam-left-end", "beam-midspan", "beam-right-end"


class LimitAnalysisError(ValueError):
    pass


class EmptyMechanism(LimitAnalysisError):
    pass


class NoHorizontalWork(LimitAnalysisError):
    pass


class GravityCollapse(LimitAnalysisError):
    pass


class BoundExceeded(LimitAnalysisError):
    pass


@dataclass(frozen=True)
class HingeSection:
    id: int
    location: str
    member: str  # "column" or "beam"
    level: int  # storey for columns, floor for beams (1-based)
    index: int  # column line or bay (0-based)

    def label(self) -> str:
        if self.member == "column":
            return f"C{self.level}.{self.index} {self.location}"
        return f"B{self.level}.{self.index} {self.location}"


@dataclass(frozen=True)
class ElementaryMechanism:
    kind: str  # "beam", "sway" or "joint"
    level: int
    index: int
    rotations: dict[int, float]
    w_ext_h_a: float
    w_ext_h_b: float
    w_ext_v: float
    top_disp: float

    def w_ext_h(self, pattern: str) -> float:
        return self.w_ext_h_a if pattern == "A" else self.w_ext_h_b


@dataclass(frozen=True)
class _Basis:
    """Geometry-only part of the mechanism set (independent of sections and loads)."""

    sections: tuple[HingeSection, ...]
    kinds: tuple[str, ...]
    levels: tuple[int, ...]
    indices: tuple[int, ...]
    rotations: np.ndarray  # (N, S)


def column_section(geometry: FrameGeometry, storey: int, column: int, top: bool) -> int:
    return ((storey - 1) * geometry.n_columns + column) * 2 + int(top)


def beam_section(geometry: FrameGeometry, floor: int, bay: int, pos: int) -> int:
    base = 2 * geometry.n_columns * geometry.n_floors
    return base + ((floor - 1) * geometry.n_bays + bay) * 3 + pos


def joint_members(geometry: FrameGeometry, column: int, floor: int) -> int:
    count = 1  # column below
    count += floor < geometry.n_floors
    count += column > 0
    count += column < geometry.n_columns - 1
    return count


@lru_cache(maxsize=64)
def _basis(geometry: FrameGeometry) -> _Basis:
    nf, nc = geometry.n_floors, geometry.n_columns
    sections = []
    for s in range(1, nf + 1):
        for j in range(nc):
            sections.append(HingeSection(len(sections), COLUMN_BOTTOM, "column", s, j))
            sections.append(HingeSection(len(sections), COLUMN_TOP, "column", s, j))
    for k in range(1, nf + 1):
        for b in range(nc - 1):
            for loc in (BEAM_LEFT, BEAM_MID, BEAM_RIGHT):
                sections.append(HingeSection(len(sections), loc, "beam", k, b))

    rows, kinds, levels, indices = [], [], [], []

    def add(kind, level, index, row):
        kinds.append(kind)
        levels.append(level)
        indices.append(index)
        rows.append(row)

    n_sec = len(sections)
    for k in range(1, nf + 1):
        for b in range(nc - 1):
            row = np.zeros(n_sec)
            row[beam_section(geometry, k, b, 0)] = -1.0
            row[beam_section(geometry, k, b, 1)] = 2.0
            row[beam_section(geometry, k, b, 2)] = 1.0
            add("beam", k, b, row)
    for s in range(1, nf + 1):
        row = np.zeros(n_sec)
        for j in range(nc):
            row[column_section(geometry, s, j, False)] = -1.0
            row[column_section(geometry, s, j, True)] = -1.0
        add("sway", s, 0, row)
    for k in range(1, nf + 1):
        for j in range(nc):
            if joint_members(geometry, j, k) < 3:
                continue
            row = np.zeros(n_sec)
            row[column_section(geometry, k, j, True)] = 1.0
            if k < nf:
                row[column_section(geometry, k + 1, j, False)] = 1.0
            if j > 0:
                row[beam_section(geometry, k, j - 1, 2)] = 1.0
            if j < nc - 1:
                row[beam_section(geometry, k, j, 0)] = 1.0
            add("joint", k, j, row)

    rot = np.array(rows)
    rot.setflags(write=False)
    return _Basis(tuple(sections), tuple(kinds), tuple(levels), tuple(indices), rot)


def section_capacities(geometry: FrameGeometry, chromosome: Sequence[int], catalog: Sequence[Profile]) -> np.ndarray:
    """Plastic moment (kN*m) of the member owning each hinge section."""
    basis = _basis(geometry)
    cols, beams = column_genes(chromosome), beam_genes(chromosome)
    mp = np.empty(len(basis.sections))
    for sec in basis.sections:
        gene = cols[sec.level - 1] if sec.member == "column" else beams[sec.level - 1]
        mp[sec.id] = catalog[gene - 1].mp_knm
    return mp


@dataclass(frozen=True)
class MechanismSet:
    """Elementary mechanisms of one frame design, in dense array form."""

    geometry: FrameGeometry
    sections: tuple[HingeSection, ...]
    mechanisms: tuple[ElementaryMechanism, ...]
    rotations: np.ndarray  # (N, S) per unit amplitude
    capacities: np.ndarray  # (S,) kN*m
    w_ext_h_a: np.ndarray  # (N,) kN*m per unit amplitude, unit load multiplier
    w_ext_h_b: np.ndarray
    w_ext_v: np.ndarray
    top_disp: np.ndarray  # (N,) m per unit amplitude
    sway_storey: np.ndarray  # (N,) storey of sway mechanisms, 0 otherwise
    storey_gravity: np.ndarray  # (N_f,) cumulative gravity through each storey, kN

    def __len__(self) -> int:
        return len(self.mechanisms)

    def w_ext_h(self, pattern: str) -> np.ndarray:
        if pattern == "A":
            return self.w_ext_h_a
        if pattern == "B":
            return self.w_ext_h_b
        raise ValueError(f"unknown load pattern {pattern!r}")

    def counts(self) -> dict[str, int]:
        out = {"beam": 0, "sway": 0, "joint": 0}
        for m in self.mechanisms:
            out[m.kind] += 1
        out["total"] = len(self.mechanisms)
        return out


def enumerate_mechanisms(
    geometry: FrameGeometry,
    loads: LoadSet,
    chromosome: Sequence[int],
    catalog: Sequence[Profile],
) -> MechanismSet:
    basis = _basis(geometry)
    h, span = geometry.storey_height, geometry.bay_length
    fa = np.asarray(loads.forces_a, dtype=float)
    fb = np.asarray(loads.forces_b, dtype=float)
    q = np.asarray(loads.q, dtype=float)

    n = len(basis.kinds)
    wha, whb, wv, top, sway = (np.zeros(n) for _ in range(5))
    mechs = []
    for i, (kind, level, index) in enumerate(zip(basis.kinds, basis.levels, basis.indices)):
        if kind == "beam":
            wv[i] = q[level - 1] * span * span / 4.0
        elif kind == "sway":
            wha[i] = h * fa[level - 1:].sum()
            whb[i] = h * fb[level - 1:].sum()
            top[i] = h
            sway[i] = level
        row = basis.rotations[i]
        nz = np.flatnonzero(row)
        mechs.append(ElementaryMechanism(
            kind, level, index, {int(s): float(row[s]) for s in nz},
            float(wha[i]), float(whb[i]), float(wv[i]), float(top[i]),
        ))

    gravity = q * geometry.n_bays * span
    cumulative = np.cumsum(gravity[::-1])[::-1]
    return MechanismSet(
        geometry=geometry,
        sections=basis.sections,
        mechanisms=tuple(mechs),
        rotations=basis.rotations,
        capacities=section_capacities(geometry, chromosome, catalog),
        w_ext_h_a=wha,
        w_ext_h_b=whb,
        w_ext_v=wv,
        top_disp=top,
        sway_storey=sway.astype(int),
        storey_gravity=cumulative,
    )


def mechanisms_for(genes: Sequence[int], problem: DesignProblem) -> MechanismSet:
    return enumerate_mechanisms(problem.geometry, problem.loads, genes, problem.catalog)


@dataclass(frozen=True)
class CombinedMechanism:
    bits: tuple[int, ...]
    pattern: str
    rotations: np.ndarray  # (S,)
    w_int: float
    w_ext_h: float
    w_ext_v: float
    top_disp: float
    active_sways: tuple[int, ...]

    def hinges(self) -> list[tuple[int, float]]:
        """(section id, rotation) of every section that actually rotates."""
        return [(int(s), float(self.rotations[s])) for s in np.flatnonzero(self.rotations)]


def combine(mset: MechanismSet, bits: Sequence[int], pattern: str = "A") -> CombinedMechanism:
    c = np.asarray(bits, dtype=float)
    if c.shape != (len(mset),):
        raise ValueError(f"mechanism chromosome must have {len(mset)} bits")
    if not c.any():
        raise EmptyMechanism("no elementary mechanism selected")
    rot = c @ mset.rotations
    active = tuple(int(s) for s in mset.sway_storey[c > 0] if s > 0)
    return CombinedMechanism(
        bits=tuple(int(b) for b in bits),
        pattern=pattern,
        rotations=rot,
        w_int=float(np.abs(rot) @ mset.capacities),
        w_ext_h=float(c @ mset.w_ext_h(pattern)),
        w_ext_v=float(c @ mset.w_ext_v),
        top_disp=float(c @ mset.top_disp),
        active_sways=active,
    )


def lambda0(cm: CombinedMechanism) -> float:
    """First-order collapse multiplier of the horizontal pattern for one mechanism."""
    if cm.w_ext_h <= W_EXT_H_EPS:
        raise NoHorizontalWork("combination does no work against the horizontal forces")
    net = cm.w_int - cm.w_ext_v
    if net <= 0:
        raise GravityCollapse("vertical loads alone activate this mechanism")
    return net / cm.w_ext_h


def lambda0_batch(mset: MechanismSet, bits: np.ndarray, pattern: str) -> np.ndarray:
    """Vectorized multiplier for a (M, N) 0/1 matrix.

    Combinations without horizontal work get +inf; gravity-driven ones get 0.
    """
    bits = np.asarray(bits, dtype=float)
    w_int = np.abs(bits @ mset.rotations) @ mset.capacities
    w_h = bits @ mset.w_ext_h(pattern)
    net = w_int - bits @ mset.w_ext_v
    out = np.full(bits.shape[0], np.inf)
    ok = w_h > W_EXT_H_EPS
    out[ok] = np.maximum(net[ok], 0.0) / w_h[ok]
    return out


def gravity_collapse(mset: MechanismSet) -> bool:
    """True when some beam mechanism collapses under the vertical loads alone."""
    beams = np.array([m.kind == "beam" for m in mset.mechanisms])
    if not beams.any():
        return False
    w_int = np.abs(mset.rotations[beams]) @ mset.capacities
    return bool(np.any(w_int - mset.w_ext_v[beams] <= 0))


def _bit_rows(start: int, stop: int, n: int) -> np.ndarray:
    # row r encodes integer r with c_1 as the most significant bit
    ints = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((ints[:, None] >> shifts) & 1).astype(np.int8)


def exhaustive_min_lambda0(
    mset: MechanismSet,
    pattern: str,
    bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> tuple[float, tuple[int, ...]]:
    """Minimum multiplier over all 2^N - 1 nonempty combinations.

    Ties resolve to the lexicographically lowest bit string, which is the
    lowest integer when c_1 is read as the most significant bit.
    """
    n = len(mset)
    if n > bound:
        raise BoundExceeded(f"{n} mechanisms exceed the exhaustive bound {bound}")
    best_val, best_int = np.inf, None
    total = 1 << n
    for start in range(1, total, _CHUNK):
        rows = _bit_rows(start, min(start + _CHUNK, total), n)
        vals = lambda0_batch(mset, rows, pattern)
        i = int(np.argmin(vals))  # first occurrence = lowest integer
        if vals[i] < best_val:
            best_val, best_int = float(vals[i]), start + i
    if best_int is None:
        best_int = 1
    bits = tuple(int(b) for b in _bit_rows(best_int, best_int + 1, n)[0])
    return best_val, bits


def brute_force_min_lambda0(mset: MechanismSet, pattern: str) -> tuple[float, tuple[int, ...]]:
    """Scalar reference enumeration, one combination at a time."""
    best, arg = np.inf, None
    for bits in itertools.product((0, 1), repeat=len(mset)):
        if not any(bits):
            continue
        cm = combine(mset, bits, pattern)
        try:
            val = lambda0(cm)
        except NoHorizontalWork:
            val = np.inf
        except GravityCollapse:
            val = 0.0
        if val < best:
            best, arg = val, bits
    return best, arg


def second_order_slope(cm: CombinedMechanism, mset: MechanismSet) -> tuple[float, bool]:
    """P-delta slope gamma (1/m) of the mechanism, and whether it is defined.

    gamma = sum(P_s * H) / (W_extH * sum(H)) over active sway storeys, with P_s the
    gravity load carried through storey s.
    """
    if not cm.active_sways:
        return 0.0, False
    h = mset.geometry.storey_height
    num = sum(mset.storey_gravity[s - 1] * h for s in cm.active_sways)
    den = cm.w_ext_h * h * len(cm.active_sways)
    return float(num / den), True
