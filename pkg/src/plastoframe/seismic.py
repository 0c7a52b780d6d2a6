"""Bilinear capacity curve, equivalent SDOF system and spectrum-based demand."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import GRAVITY, CalibrationParams, SpectrumParams
from .limit import CombinedMechanism


class AssessmentError(ValueError):
    pass


class NonPositivePeak(AssessmentError):
    pass


@dataclass(frozen=True)
class CapacityCurve:
    k_i: float  # kN/m
    k_e: float
    u_peak: float  # m
    v_peak: float  # kN
    k_s: float  # kN/m, post-peak slope (<= 0)
    u_u: float  # m
    lambda0: float
    lambda_c: float
    gamma: float
    total_force: float  # kN at unit multiplier
    governing_limit: str  # "chord-rotation" or "shear-drop"
    u_chord: float
    u_drop: float

    def shear(self, u: float) -> float:
        if u <= self.u_peak:
            return self.k_i * u
        return self.v_peak + self.k_s * (u - self.u_peak)

    def points(self) -> list[tuple[float, float]]:
        return [(0.0, 0.0), (self.u_peak, self.v_peak), (self.u_u, self.shear(self.u_u))]


def build_capacity(
    lambda0: float,
    gamma: float,
    k_e: float,
    calibration: CalibrationParams,
    mechanism: CombinedMechanism,
    total_force: float,
) -> CapacityCurve:
    """Intersect the reduced elastic branch with the second-order rigid-plastic line."""
    if not lambda0 > 0:
        raise AssessmentError("collapse multiplier must be positive")
    k_i = calibration.kappa * k_e
    u_peak = lambda0 * total_force / (k_i + gamma * total_force)
    lambda_c = lambda0 - gamma * u_peak
    if lambda_c <= 0:
        raise NonPositivePeak("second-order effects leave no lateral strength")
    v_peak = k_i * u_peak
    k_s = -gamma * total_force

    max_rot = float(np.max(np.abs(mechanism.rotations)))
    u_chord = u_peak + mechanism.top_disp * calibration.theta_u / max_rot
    u_drop = u_peak + calibration.beta_drop * v_peak / abs(k_s) if gamma > 0 else math.inf
    if u_drop < u_chord:
        u_u, limit = u_drop, "shear-drop"
    else:
        u_u, limit = u_chord, "chord-rotation"
    return CapacityCurve(
        k_i=k_i, k_e=k_e, u_peak=u_peak, v_peak=v_peak, k_s=k_s, u_u=u_u,
        lambda0=lambda0, lambda_c=lambda_c, gamma=gamma, total_force=total_force,
        governing_limit=limit, u_chord=u_chord, u_drop=u_drop,
    )


@dataclass(frozen=True)
class SdofSystem:
    gamma_factor: float
    m_star: float  # t
    period: float  # s
    f_y: float  # kN
    d_y: float  # m
    d_cu: float  # m


def participation(masses: Sequence[float], shape: Sequence[float]) -> tuple[float, float]:
    """Transformation factor and effective mass for a top-normalized shape."""
    m = np.asarray(masses, dtype=float)
    phi = np.asarray(shape, dtype=float)
    denom = float(m @ (phi * phi))
    if denom <= 0:
        raise AssessmentError("degenerate displacement shape or masses")
    m_star = float(m @ phi)
    return m_star / denom, m_star


def sdof_transform(curve: CapacityCurve, masses: Sequence[float], shape: Sequence[float]) -> SdofSystem:
    gamma_factor, m_star = participation(masses, shape)
    d_y = curve.u_peak / gamma_factor
    f_y = curve.v_peak / gamma_factor
    period = 2.0 * math.pi * math.sqrt(m_star * d_y / f_y)
    return SdofSystem(gamma_factor, m_star, period, f_y, d_y, curve.u_u / gamma_factor)


def spectral_acceleration(period: float, sp: SpectrumParams) -> float:
    """Elastic pseudo-acceleration in g."""
    if period < 0:
        raise ValueError("period must be >= 0")
    peak = sp.ag_s * sp.eta * sp.f0
    if period < sp.tb:
        r = period / sp.tb
        return peak * (r + (1.0 - r) / (sp.eta * sp.f0))
    if period < sp.tc:
        return peak
    if period < sp.td:
        return peak * sp.tc / period
    return peak * sp.tc * sp.td / period**2


def spectral_displacement(period: float, sp: SpectrumParams) -> float:
    """Elastic spectral displacement in m."""
    return spectral_acceleration(period, sp) * GRAVITY * (period / (2.0 * math.pi)) ** 2


def demand_displacement(sdof: SdofSystem, sp: SpectrumParams) -> float:
    """Displacement demand of the elastic-plastic SDOF system (m)."""
    t = sdof.period
    sde = spectral_displacement(t, sp)
    if t >= sp.tc:
        return sde
    q_star = spectral_acceleration(t, sp) * GRAVITY * sdof.m_star / sdof.f_y
    return inelastic_demand(sde, q_star, t, sp.tc)


def inelastic_demand(sde: float, q_star: float, period: float, tc: float) -> float:
    if period >= tc or q_star <= 1.0:
        return sde
    return max(sde, sde / q_star * (1.0 + (q_star - 1.0) * tc / period))


def safety_factor(d_cu: float, d_max: float) -> float:
    if not d_max > 0:
        raise AssessmentError("seismic demand must be positive")
    return d_cu / d_max


@dataclass(frozen=True)
class SafetyAssessment:
    pattern: str
    curve: CapacityCurve
    sdof: SdofSystem
    d_max: float
    sf: float

    @property
    def d_cu(self) -> float:
        return self.sdof.d_cu
