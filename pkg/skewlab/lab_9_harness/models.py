"""
Experiment configuration models.

One YAML document per run. Unknown keys are rejected; fields an experiment
leaves out are filled from its battery defaults before the config is hashed,
so the manifest always records the effective parameters.
"""
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..lab_1_fbm.core import Grid, HurstParam, RngSeed
from ..lab_2_besov.core import DriftSpec, smooth_preset
from ..lab_6_solver.core import MollifierSchedule, SolveConfig
from ..shared import lab_rules

EXPERIMENTS = (
    "sample-fbm",
    "local-time",
    "averaging",
    "skew",
    "uniqueness",
    "regularity-scan",
    "operator-roundtrip",
    "invariant-suite",
    "regime-map",
)
ExperimentName = Literal[
    "sample-fbm", "local-time", "averaging", "skew", "uniqueness",
    "regularity-scan", "operator-roundtrip", "invariant-suite", "regime-map",
]
Family = Literal["gaussian", "gaussian_odd", "bump"]

# Battery defaults: acceptance-size runs, reducible per config.
BATTERY_DEFAULTS: dict[str, dict] = {
    "sample-fbm": {"hurst": 0.3, "n_steps": 256, "n_paths": 50_000, "sampler": "cholesky"},
    "local-time": {"hurst": 0.3, "n_steps": 4096, "n_paths": 500, "m_cells": 512, "moment": 8.0},
    "averaging": {"hurst": 0.3, "n_steps": 4096, "n_paths": 1, "m_cells": 1024,
                  "drift": {"variant": "gaussian", "mass": 1.0, "width": 2.0}},
    "skew": {"hurst": 0.3, "n_steps": 1024, "n_paths": 100, "drift": {"variant": "dirac", "mass": 1.0}},
    "uniqueness": {"hurst": 0.25, "n_steps": 1024, "n_paths": 200,
                   "drift": {"variant": "dirac", "mass": 1.0},
                   "schedules": [{"family": "gaussian", "levels": [8, 32, 128]},
                                 {"family": "gaussian_odd", "levels": [8, 32, 128]}]},
    "regularity-scan": {"hurst": 0.25, "n_steps": 4096, "n_paths": 2000, "moment": 2.0,
                        "drift": {"variant": "dirac", "mass": 1.0},
                        "control_drift": {"variant": "gaussian", "mass": 1.0, "width": 4.0}},
    "operator-roundtrip": {"hurst": 0.3, "n_steps": 4096, "n_paths": 1000},
    "invariant-suite": {"hurst": 0.3, "n_steps": 256, "n_paths": 64,
                        "young": {"p": 1.0, "q": 3.0, "eta": 0.5}},
    "regime-map": {"hurst": 0.25, "n_steps": 2, "n_paths": 1,
                   "regime_map": {"h_values": [round(0.05 * k, 2) for k in range(1, 11)],
                                  "beta_values": [round(-1.5 + 0.1 * k, 1) for k in range(21)],
                                  "p": 1.0}},
}


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(StrictModel):
    t_end: float = Field(1.0, gt=0)
    n_steps: int = Field(256, ge=2)

    def build(self) -> Grid:
        return Grid(self.t_end, self.n_steps)


class DriftConfig(StrictModel):
    variant: Literal["dirac", "gaussian", "power_cusp", "smooth"]
    mass: float = 1.0
    width: float | None = Field(None, gt=0)
    exponent: float | None = Field(None, gt=-1, lt=0)
    radius: float | None = Field(None, gt=0)
    amplitude: float = 1.0
    preset: Literal["constant", "sine", "tanh", "linear"] | None = None
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _variant_fields(self) -> "DriftConfig":
        if self.variant == "gaussian" and self.width is None:
            raise ValueError("gaussian drift needs 'width' (variance of the profile)")
        if self.variant == "power_cusp" and (self.exponent is None or self.radius is None):
            raise ValueError("power_cusp drift needs 'exponent' in (-1, 0) and 'radius'")
        if self.variant == "smooth" and self.preset is None:
            raise ValueError("smooth drift needs a 'preset'")
        return self

    def build(self) -> DriftSpec:
        if self.variant == "dirac":
            return DriftSpec.dirac(self.mass)
        if self.variant == "gaussian":
            return DriftSpec.gaussian(self.mass, self.width)
        if self.variant == "power_cusp":
            return DriftSpec.power_cusp(self.exponent, self.radius, self.amplitude)
        return smooth_preset(self.preset, **self.params)


class ScheduleConfig(StrictModel):
    family: Family
    levels: list[int] = Field(min_length=1)

    @model_validator(mode="after")
    def _positive_levels(self) -> "ScheduleConfig":
        if any(n < 1 for n in self.levels):
            raise ValueError("mollifier levels must be >= 1")
        return self

    def build(self) -> MollifierSchedule:
        return MollifierSchedule(self.family, tuple(self.levels))


class MollifierConfig(StrictModel):
    family: Family = "gaussian"
    n: int = Field(64, ge=1)


class YoungConfig(StrictModel):
    p: float = Field(ge=1)
    q: float = Field(ge=1)
    eta: float = Field(gt=0, lt=1)


class ScanConfig(StrictModel):
    moment: float | None = Field(None, gt=0)
    lags: list[int] | None = None


class RegimeMapConfig(StrictModel):
    h_values: list[float] = Field(min_length=1)
    beta_values: list[float] = Field(min_length=1)
    p: float = Field(1.0, ge=1)


class ExperimentConfig(StrictModel):
    experiment: ExperimentName
    hurst: float | None = Field(None, gt=0, le=0.5)
    seed: int = Field(0, ge=0)
    grid: GridConfig | None = None
    sampler: Literal["cholesky", "circulant", "volterra"] | None = None
    n_paths: int | None = Field(None, ge=1)
    x0: float = 0.0
    drift: DriftConfig | None = None
    control_drift: DriftConfig | None = None
    method: Literal["mollified", "pathbypath"] = "pathbypath"
    mollifier: MollifierConfig = Field(default_factory=MollifierConfig)
    schedules: list[ScheduleConfig] | None = None
    young: YoungConfig | None = None
    scan: ScanConfig = Field(default_factory=ScanConfig)
    m_cells: int | None = Field(None, ge=2)
    probes: list[tuple[float, float]] | None = None
    regime_map: RegimeMapConfig | None = None
    export_paths: int = Field(10, ge=0)

    @model_validator(mode="after")
    def _battery_defaults(self) -> "ExperimentConfig":
        defaults = BATTERY_DEFAULTS[self.experiment]
        if self.hurst is None:
            self.hurst = defaults["hurst"]
        if self.grid is None:
            self.grid = GridConfig(n_steps=defaults["n_steps"])
        if self.sampler is None:
            self.sampler = defaults.get("sampler", "volterra")
        if self.n_paths is None:
            self.n_paths = defaults["n_paths"]
        if self.m_cells is None:
            self.m_cells = defaults.get("m_cells", 1024)
        if self.scan.moment is None:
            self.scan.moment = defaults.get("moment", 2.0)
        for key, model in (("drift", DriftConfig), ("control_drift", DriftConfig), ("young", YoungConfig),
                           ("regime_map", RegimeMapConfig)):
            if getattr(self, key) is None and key in defaults:
                setattr(self, key, model.model_validate(defaults[key]))
        if self.schedules is None and "schedules" in defaults:
            self.schedules = [ScheduleConfig.model_validate(s) for s in defaults["schedules"]]
        if self.probes is None and self.experiment == "sample-fbm":
            T = self.grid.t_end
            self.probes = [(0.25 * T, 0.5 * T), (0.5 * T, 0.5 * T), (0.5 * T, T), (0.75 * T, T), (T, T)]
        return self

    # --- builders ---
    def time_grid(self) -> Grid:
        return self.grid.build()

    def solve_config(self, drift: DriftConfig | None = None, method: str | None = None) -> SolveConfig:
        drift = drift or self.drift
        method = method or self.method
        mollified = method == "mollified"
        return SolveConfig(drift.build(), HurstParam(self.hurst), self.time_grid(), self.x0, method,
                           n=self.mollifier.n if mollified else None, family=self.mollifier.family,
                           seed=RngSeed(self.seed))

    def regime(self) -> dict:
        if self.drift is None:
            return {}
        meta = self.drift.build().besov_meta
        return lab_rules.classify_regime(self.hurst, meta.s, meta.p)

    def canonical(self) -> dict:
        return self.model_dump(mode="json")

    def summary(self) -> dict:
        return {"experiment": self.experiment, "H": self.hurst, "n_steps": self.grid.n_steps, "n_paths": self.n_paths}


# ═══════════════════════════════════════════════════════════════════════════════
# CROSS-FIELD RULES
# ═══════════════════════════════════════════════════════════════════════════════
def _on_grid(t: float, grid: GridConfig) -> bool:
    k = t / grid.t_end * grid.n_steps
    return 0 < t <= grid.t_end and math.isclose(k, round(k), abs_tol=1e-9)


def cross_field_issues(cfg: ExperimentConfig) -> list[dict[str, str]]:
    """Checks that need more than one field; each issue is {loc, msg}."""
    issues = list(lab_rules.check_sampler_grid(cfg.sampler, cfg.grid.n_steps))
    if cfg.young is not None:
        issues += lab_rules.check_young(cfg.young.p, cfg.young.q, cfg.young.eta)
    if cfg.experiment == "skew" and cfg.drift.variant != "dirac":
        issues.append({"loc": "drift.variant", "msg": "skew runs take a dirac drift (a·δ_0)"})
    if cfg.experiment == "regularity-scan" and cfg.method == "pathbypath":
        issues += lab_rules.check_pathbypath_drift(cfg.drift.variant, cfg.drift.preset)
    if cfg.experiment == "operator-roundtrip" and cfg.sampler != "volterra":
        issues.append({"loc": "sampler", "msg": "operator-roundtrip needs the driving Brownian paths (volterra)"})
    if cfg.experiment == "uniqueness":
        issues += _schedule_issues(cfg.schedules)
    for i, pair in enumerate(cfg.probes or []):
        if not all(_on_grid(t, cfg.grid) for t in pair):
            issues.append({"loc": f"probes.{i}", "msg": f"probe {list(pair)} is not a grid time in (0, T]"})
    if cfg.scan.lags is not None and any(h < 1 or h > cfg.grid.n_steps for h in cfg.scan.lags):
        issues.append({"loc": "scan.lags", "msg": f"lags must lie within 1..{cfg.grid.n_steps}"})
    return issues


def _schedule_issues(schedules: list[ScheduleConfig]) -> list[dict[str, str]]:
    if len(schedules) != 2:
        return [{"loc": "schedules", "msg": f"uniqueness compares exactly two schedules, got {len(schedules)}"}]
    a, b = schedules
    if len(a.levels) != len(b.levels):
        return [{"loc": "schedules", "msg": "both schedules need the same number of levels"}]
    if a.family == b.family and a.levels == b.levels:
        return [{"loc": "schedules", "msg": "the two mollifier schedules must differ"}]
    return []


def config_warnings(cfg: ExperimentConfig) -> list[str]:
    if cfg.drift is None:
        return []
    meta = cfg.drift.build().besov_meta
    return lab_rules.regime_warnings(cfg.experiment, cfg.hurst, meta.s, meta.p)
