"""Config file parsing (YAML or JSON text) into a validated DesignProblem."""
from __future__ import annotations

import hashlib
import json
from importlib import resources
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .model import (
    CalibrationParams,
    DesignProblem,
    FitnessWeights,
    FrameGeometry,
    GaSettings,
    LoadSet,
    ModelError,
    Profile,
    SpectrumParams,
    plastic_moment,
)

MP_REL_TOL = 1e-3


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryModel(_Strict):
    n_floors: int
    n_columns: int
    bay_length_m: float
    storey_height_m: float


class LoadsModel(_Strict):
    q_kn_per_m: float | list[float]
    forces_mass_proportional_kn: list[float]
    forces_inverse_triangular_kn: list[float]


class ProfileModel(_Strict):
    id: int = Field(ge=1)
    name: str
    I_cm4: float
    A_cm2: float
    Wp_cm3: float
    Mp_knm: Optional[float] = None


class WeightsModel(_Strict):
    a1: float = 0.2
    a2: float = 0.6
    a3: float = 0.1
    a4: float = 0.1


class SpectrumModel(_Strict):
    ag_s_g: float
    f0: float
    tb_s: float
    tc_s: float
    td_s: float
    eta: float = 1.0


class GaModel(_Strict):
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
    internal_mode: str = "ga"
    exhaustive_bound: int = 24


class CalibrationModel(_Strict):
    kappa: float = 0.5
    theta_u_rad: float = 0.03
    beta_drop: float = 0.15
    rho_kg_m3: float = 7850.0
    E_mpa: float = 210000.0
    fy_mpa: float = 235.0


class ConfigModel(_Strict):
    geometry: GeometryModel
    loads: LoadsModel
    catalog: list[ProfileModel]
    weights: WeightsModel = WeightsModel()
    spectrum: SpectrumModel
    ga: GaModel = GaModel()
    calibration: CalibrationModel = CalibrationModel()


def _describe(err: ValidationError) -> str:
    first = err.errors()[0]
    key = ".".join(str(p) for p in first["loc"])
    return f"config key '{key}': {first['msg']}"


def problem_from_mapping(data: dict) -> DesignProblem:
    try:
        cfg = ConfigModel.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_describe(err)) from None

    try:
        geometry = FrameGeometry(
            cfg.geometry.n_floors, cfg.geometry.n_columns,
            cfg.geometry.bay_length_m, cfg.geometry.storey_height_m,
        )
        q = cfg.loads.q_kn_per_m
        if not isinstance(q, list):
            q = [q] * geometry.n_floors
        loads = LoadSet(
            tuple(q),
            tuple(cfg.loads.forces_mass_proportional_kn),
            tuple(cfg.loads.forces_inverse_triangular_kn),
        )
        cal = cfg.calibration
        calibration = CalibrationParams(
            cal.kappa, cal.theta_u_rad, cal.beta_drop, cal.rho_kg_m3, cal.E_mpa, cal.fy_mpa
        )
        catalog = []
        for row in cfg.catalog:
            derived = row.Wp_cm3 * cal.fy_mpa * 1e-3
            mp = row.Mp_knm if row.Mp_knm is not None else derived
            profile = Profile(row.id, row.name, row.I_cm4, row.A_cm2, row.Wp_cm3, mp)
            if abs(mp - plastic_moment(profile, cal.fy_mpa)) > MP_REL_TOL * mp:
                raise ModelError(
                    f"catalog: profile {row.name!r} Mp_knm={mp} disagrees with Wp*fy={derived:.4f}"
                )
            catalog.append(profile)
        w = cfg.weights
        sp = cfg.spectrum
        return DesignProblem(
            geometry=geometry,
            loads=loads,
            catalog=tuple(catalog),
            spectrum=SpectrumParams(sp.ag_s_g, sp.f0, sp.tb_s, sp.tc_s, sp.td_s, sp.eta),
            weights=FitnessWeights(w.a1, w.a2, w.a3, w.a4),
            ga=GaSettings(**cfg.ga.model_dump()),
            calibration=calibration,
        )
    except ModelError as err:
        raise ConfigError(str(err)) from None


def parse_problem(config_text: str) -> DesignProblem:
    try:
        data = yaml.safe_load(config_text)
    except yaml.YAMLError as err:
        raise ConfigError(f"config is not valid YAML/JSON: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at top level")
    return problem_from_mapping(data)


def load_problem(path: str) -> DesignProblem:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def canonical_config(config_text: str) -> str:
    """Key-sorted JSON form of a config, stable across formatting changes."""
    return json.dumps(yaml.safe_load(config_text), sort_keys=True, separators=(",", ":"))


def config_hash(config_text: str) -> str:
    return hashlib.sha256(canonical_config(config_text).encode()).hexdigest()


FIXTURES = ("two_storey", "five_storey", "portal")


def fixture_text(name: str) -> str:
    return resources.files("plastoframe.fixtures").joinpath(f"{name}.yaml").read_text(encoding="utf-8")


def fixture_problem(name: str) -> DesignProblem:
    return parse_problem(fixture_text(name))
