"""
Lab_9_Harness: the experiment battery behind `skewlab run`.

An experiment composes station operations and returns its metrics, its JSON
report and its staged artifacts. Nothing touches the output directory until
the experiment has finished; the archivist then writes every file and the
manifest. Threshold misses map to exit 2, exceptions to exit 1 with a failure
manifest.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import pandas as pd
import yaml
from pydantic import ValidationError

from ..lab_1_fbm.core import (
    Grid,
    Lab1Sampler,
    RngSeed,
    SamplePath,
    fbm_covariance,
    fit_local_nondeterminism,
    fit_two_time_lower_bound,
    sample_fbm_volterra,
)
from ..lab_2_besov.core import (
    BesovParams,
    DriftSpec,
    besov_norm,
    heat_smoothing_slope,
    littlewood_paley_blocks,
    semigroup_contraction,
    smooth_preset,
    to_grid_field,
)
from ..lab_3_localtime.core import (
    Lab3LocalTime,
    SpaceGrid,
    holder_exponent_scan,
    mass_defect,
    occupation_density,
    occupation_formula_residual,
)
from ..lab_4_averaging.core import Lab4Averaging, averaging_direct, averaging_via_localtime
from ..lab_5_young.core import AveragingFunctional, nly_solve_euler, sewing_residual
from ..lab_6_solver.core import Lab6Solver, regularity_scan, skew_fbm, uniqueness_diagnostic
from ..lab_7_fracops.core import Lab7Operators, fbm_to_bm
from ..lab_8_archivist.core import Lab8Archivist, config_hash
from ..shared import lab_rules
from ..shared.data_expert import DataExpert
from ..shared.errors import ConfigError
from ..shared.utils import RunStatus, make_rng, report_activity, resolve_output_dir
from .models import EXPERIMENTS, ExperimentConfig, config_warnings, cross_field_issues

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-9")

REPORT_NAME = "report.json"

# thresholds
EXACT_COVARIANCE_TOL = 0.03
VOLTERRA_COVARIANCE_TOL = 0.05
LND_SLOPE_TOL = 0.02
OCCUPATION_RESIDUAL_TOL = 1e-10
REFINEMENT_RATIO_MIN = 1.5
EXPONENT_BAND = 0.1
TWO_ROUTE_TOL = 1e-3
UNIQUENESS_FINAL_FRACTION = 0.05
ROUNDTRIP_TOL = 0.05
ANNIHILATION_TOL = 1e-10
DECOMPOSITION_TOL = 1e-6
BOUNDEDNESS_CAP = 5.0

TWO_TIME_PROBES = 20
TWO_TIME_STREAM = 1
REFINEMENT_PATHS = 8
REFINEMENT_COARSE_CELLS = 64
FIELD_TIME_ROWS = 64


@dataclass
class ExperimentResult:
    metrics: dict
    report: dict
    artifacts: dict[str, Any] = field(default_factory=dict)
    passed: bool = True
    warnings: list[str] = field(default_factory=list)


ExperimentFn = Callable[[ExperimentConfig, int], ExperimentResult]
EXPERIMENT_REGISTRY: dict[str, ExperimentFn] = {}
EXPERIMENT_SUMMARIES: dict[str, str] = {}


def experiment(name: str, summary: str):
    def register(fn: ExperimentFn) -> ExperimentFn:
        EXPERIMENT_REGISTRY[name] = fn
        EXPERIMENT_SUMMARIES[name] = summary
        return fn
    return register


def _path_artifacts(rows: np.ndarray, grid: Grid, cfg: ExperimentConfig, prefix: str,
                    binary: bool = True) -> dict[str, Any]:
    """One long-format CSV (and optionally one binary block) per exported path."""
    artifacts = {}
    for i in range(min(cfg.export_paths, rows.shape[0])):
        frame = DataExpert.path_frame(rows[i], grid.points)
        frame["path_id"] = i
        artifacts[f"{prefix}_{i:03d}.csv"] = frame
        if binary:
            artifacts[f"{prefix}_{i:03d}.bin"] = DataExpert.path_block_bytes(rows[i], grid.t_end, cfg.hurst, cfg.seed)
    return artifacts


def _time_stride(n_steps: int) -> int:
    return max(1, n_steps // FIELD_TIME_ROWS)


# ═══════════════════════════════════════════════════════════════════════════════
# EXPERIMENTS
# ═══════════════════════════════════════════════════════════════════════════════
@experiment("sample-fbm", "fBm ensemble, covariance probes and local-nondeterminism fits")
def run_sample_fbm(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    grid, H = cfg.time_grid(), cfg.hurst
    sampler = Lab1Sampler(threads)
    ensemble = sampler.sample_ensemble(cfg.sampler, grid, H, cfg.seed, cfg.n_paths)
    probes = sampler.covariance_probe_report(ensemble, cfg.probes)
    tolerance = VOLTERRA_COVARIANCE_TOL if cfg.sampler == "volterra" else EXACT_COVARIANCE_TOL

    exact_var = fbm_covariance(grid.t_end, grid.t_end, H)
    var_T = float(np.mean(ensemble.fbm[:, -1] ** 2))
    ldn = fit_local_nondeterminism(H)
    rng = make_rng(cfg.seed, TWO_TIME_STREAM)
    triples = []
    for _ in range(TWO_TIME_PROBES):
        s, t = np.sort(rng.uniform(0.0, grid.t_end, 2))
        triples.append((float(s), float(s + rng.uniform(0.1, 1.0) * (t - s)), float(t)))
    two_time = fit_two_time_lower_bound(H, triples)

    checks = {
        "covariance": probes["worst_rel_error"] <= tolerance,
        "local_nondeterminism": abs(ldn["slope"] - 2 * H) <= LND_SLOPE_TOL,
        "two_time_lower_bound": two_time["fitted_constant"] > 0,
    }
    metrics = {"worst_rel_error": probes["worst_rel_error"], "tolerance": tolerance, "var_T": var_T,
               "var_T_exact": exact_var, "ldn_slope": ldn["slope"], "two_time_constant": two_time["fitted_constant"]}
    report = {"sampler": cfg.sampler, "probes": probes["probes"], "local_nondeterminism": ldn,
              "two_time": {**two_time, "triples": triples}, "checks": checks, **metrics}
    artifacts = _path_artifacts(ensemble.fbm, grid, cfg, "path")
    return ExperimentResult(metrics, report, artifacts, all(checks.values()))


@experiment("local-time", "occupation densities, occupation-formula residuals and the time-mode exponent")
def run_local_time(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    grid, H = cfg.time_grid(), cfg.hurst
    ensemble = Lab1Sampler(threads).sample_ensemble(cfg.sampler, grid, H, cfg.seed, cfg.n_paths)
    station = Lab3LocalTime()
    fields = station.fields_for_ensemble(ensemble, cfg.m_cells)
    paths = ensemble.paths()
    residual = max(occupation_formula_residual(p, f, np.ones_like) for p, f in zip(paths, fields))
    ratios = [station.refinement_ratio(p, lambda x: x, REFINEMENT_COARSE_CELLS)["ratio"]
              for p in paths[:REFINEMENT_PATHS]]
    ratio = float(np.median(ratios))
    scan = holder_exponent_scan(fields, mode="time", moment=cfg.scan.moment)
    target = 1.0 - H

    checks = {
        "occupation_residual": residual <= OCCUPATION_RESIDUAL_TOL * grid.t_end,
        "refinement_ratio": ratio >= REFINEMENT_RATIO_MIN,
        "time_exponent": abs(scan["slope_per_moment"] - target) <= EXPONENT_BAND and not scan["degenerate"],
    }
    metrics = {"occupation_residual": residual, "refinement_ratio": ratio,
               "time_exponent": scan["slope_per_moment"], "target": target,
               "worst_mass_defect": max(mass_defect(f) for f in fields)}
    report = {"scan": scan, "refinement_ratios": ratios, "checks": checks, **metrics}
    first = fields[0]
    artifacts = {
        "local_time.csv": DataExpert.space_time_frame(grid.points, first.space_grid.centers, first.mass, "L",
                                                      _time_stride(grid.n_steps)),
        "regression.csv": DataExpert.regression_frame(np.array(scan["lags"]), np.array(scan["moments"])),
    }
    return ExperimentResult(metrics, report, artifacts, all(checks.values()))


@experiment("averaging", "averaging operator by direct quadrature and by local-time convolution")
def run_averaging(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    grid = cfg.time_grid()
    ensemble = Lab1Sampler(threads).sample_ensemble(cfg.sampler, grid, cfg.hurst, cfg.seed, 1)
    b = cfg.drift.build()
    check = Lab4Averaging().two_route_check(b, ensemble.paths()[0], cfg.m_cells)
    discrepancy = check["relative_discrepancy"]
    field_lt = check["via_localtime"]
    metrics = {"relative_discrepancy": discrepancy, "tolerance": TWO_ROUTE_TOL, "scale": check["scale"]}
    report = {"drift": b.summary(), "window": check["window"], **metrics}
    artifacts = {"averaged_field.csv": DataExpert.space_time_frame(grid.points, field_lt.x, field_lt.values,
                                                                   "value", _time_stride(grid.n_steps))}
    return ExperimentResult(metrics, report, artifacts, discrepancy <= TWO_ROUTE_TOL)


@experiment("skew", "skew fBm: zero-drift exactness, monotone drift part and sign antisymmetry")
def run_skew(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    grid = cfg.time_grid()
    battery = Lab6Solver(threads).skew_battery(cfg.drift.mass, cfg.hurst, grid, cfg.seed, cfg.n_paths)
    ensemble = battery.pop("ensemble")
    metrics = {k: battery[k] for k in ("zero_drift_exact", "monotone", "antisymmetric", "positive_frequency")}
    metrics["k_final_mean"] = float(np.mean(ensemble.k[:, -1]))
    artifacts = {**_path_artifacts(ensemble.x, grid, cfg, "solution"),
                 **_path_artifacts(ensemble.k, grid, cfg, "driftpart", binary=False)}
    return ExperimentResult(metrics, {**battery, **metrics}, artifacts, battery["passed"], battery["warnings"])


@experiment("uniqueness", "cross-family distances of mollified solutions on shared fBm paths")
def run_uniqueness(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    schedule_a, schedule_b = (s.build() for s in cfg.schedules)
    seeds = list(range(cfg.seed, cfg.seed + cfg.n_paths))
    report = uniqueness_diagnostic(cfg.drift.build(), cfg.hurst, cfg.time_grid(), seeds, schedule_a, schedule_b,
                                   cfg.x0)
    medians = [r["median"] for r in report["rows"]]
    final_ok = medians[-1] < UNIQUENESS_FINAL_FRACTION * report["median_sup_b"]
    passed = report["strictly_decreasing"] and final_ok
    metrics = {"medians": medians, "median_sup_b": report["median_sup_b"],
               "strictly_decreasing": report["strictly_decreasing"], "final_relative": report["final_relative"],
               "empirical_rate": report.get("empirical_rate")}
    artifacts = {"distances.csv": DataExpert.distance_frame(report["rows"], seeds)}
    rows = [{k: v for k, v in r.items() if k != "distances"} for r in report["rows"]]
    return ExperimentResult(metrics, {**report, "rows": rows, "final_below_fraction": final_ok}, artifacts,
                            passed, report["warnings"])


@experiment("regularity-scan", "Hölder-in-moment exponent of the drift part K = X - B plus a smooth control")
def run_regularity_scan(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    solver = Lab6Solver(threads)
    moment, lags = cfg.scan.moment, cfg.scan.lags
    main = regularity_scan(solver.solve_ensemble(cfg.solve_config(), cfg.n_paths), moment, lags)
    control = regularity_scan(solver.solve_ensemble(cfg.solve_config(cfg.control_drift, "mollified"), cfg.n_paths),
                              moment, lags)
    metrics = {"exponent": main["exponent"], "target": main["target"], "within_band": main["within_band"],
               "control_exponent": control["exponent"], "control_within_band": control["within_band"]}
    artifacts = {
        "regression.csv": DataExpert.regression_frame(np.asarray(main["lags"]) * cfg.time_grid().dt,
                                                      np.asarray(main["moments"])),
        "control_regression.csv": DataExpert.regression_frame(np.asarray(control["lags"]) * cfg.time_grid().dt,
                                                              np.asarray(control["moments"])),
    }
    passed = main["within_band"] and control["within_band"]
    return ExperimentResult(metrics, {"scan": main, "control": control, **metrics}, artifacts, passed)


@experiment("operator-roundtrip", "fBm-to-Bm operator: roundtrip, annihilation, Bm law and boundedness")
def run_operator_roundtrip(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    grid = cfg.time_grid()
    ensemble = Lab1Sampler(threads).sample_ensemble("volterra", grid, cfg.hurst, cfg.seed, cfg.n_paths)
    operators = Lab7Operators()
    roundtrip = operators.roundtrip(ensemble)
    law = operators.bm_law(ensemble, stride=_time_stride(grid.n_steps))
    bounded = operators.boundedness_corpus(grid, cfg.hurst, cfg.seed)
    checks = {
        "roundtrip": roundtrip["max_rel_error"] <= ROUNDTRIP_TOL,
        "annihilates_constants": roundtrip["constant_image"] <= ANNIHILATION_TOL,
        "decomposition": roundtrip["decomposition_rel_gap"] <= DECOMPOSITION_TOL,
        "bm_law": law["passes"],
        "bounded": math.isfinite(bounded["max_ratio"]) and bounded["max_ratio"] <= BOUNDEDNESS_CAP,
    }
    metrics = {**{k: roundtrip[k] for k in ("max_rel_error", "median_rel_error", "constant_image",
                                            "decomposition_rel_gap")},
               "variance_slope": law["variance_slope"], "lag1_correlation": law.get("lag1_correlation"),
               "kurtosis": law.get("kurtosis"), "max_boundedness_ratio": bounded["max_ratio"]}
    report = {"roundtrip": roundtrip, "bm_law": law, "boundedness": bounded, "checks": checks}
    recovered = fbm_to_bm(ensemble.paths()[0], cfg.hurst)
    artifacts = {"recovered_bm.csv": DataExpert.path_frame(np.stack([ensemble.bm[0], recovered.values]),
                                                           grid.points)}
    return ExperimentResult(metrics, report, artifacts, all(checks.values()))


LINEAR_IN_Y = AveragingFunctional.analytic(lambda t, y: t * y, name="t*y")
TIME_ONLY = AveragingFunctional.analytic(lambda t, y: t * np.ones_like(y), name="t")


def _invariant_checks(cfg: ExperimentConfig) -> dict[str, bool]:
    grid, H, T = cfg.time_grid(), cfg.hurst, cfg.grid.t_end
    pair = sample_fbm_volterra(grid, H, RngSeed(cfg.seed))
    path = pair.fbm
    checks: dict[str, bool] = {}

    checks["fbm.covariance_symmetric"] = fbm_covariance(0.3 * T, 0.7 * T, H) == fbm_covariance(0.7 * T, 0.3 * T, H)
    checks["fbm.pair_consistent"] = pair.is_consistent()
    checks["fbm.local_nondeterminism"] = abs(fit_local_nondeterminism(H)["slope"] - 2 * H) <= LND_SLOPE_TOL

    f = to_grid_field(DriftSpec.gaussian(1.0, 0.1))
    params = BesovParams(0.5, 2.0, 2.0)
    rebuilt = littlewood_paley_blocks(f).reconstruct()
    checks["besov.partition_reconstruction"] = float(np.max(np.abs(rebuilt - f.values))
                                                     / np.max(np.abs(f.values))) <= 1e-8
    checks["besov.norm_homogeneity"] = math.isclose(besov_norm(f.with_values(2.0 * f.values), params),
                                                    2.0 * besov_norm(f, params), rel_tol=1e-12)
    heat = heat_smoothing_slope(DriftSpec.dirac(1.0), math.inf, [2.0**-k for k in range(2, 11)])
    checks["besov.heat_smoothing"] = heat["slope"] >= -0.5 - 0.05
    checks["besov.semigroup_contraction"] = semigroup_contraction(f, params, [0.01, 0.1, 1.0])["contractive"]

    lt = occupation_density(path, SpaceGrid.covering(path.values, cfg.m_cells))
    checks["localtime.mass"] = mass_defect(lt) <= OCCUPATION_RESIDUAL_TOL
    checks["localtime.nondecreasing"] = bool(np.all(lt.increments.data >= 0.0))
    checks["localtime.occupation_formula"] = (occupation_formula_residual(path, lt, np.ones_like)
                                              <= OCCUPATION_RESIDUAL_TOL * T)

    constant = averaging_direct(smooth_preset("constant", value=0.5), path, lt.space_grid)
    checks["averaging.constant_drift"] = bool(np.max(np.abs(constant.values - 0.5 * grid.points[:, None])) <= 1e-12)
    one = averaging_via_localtime(DriftSpec.gaussian(1.0, 0.5), lt).values
    two = averaging_via_localtime(DriftSpec.gaussian(2.0, 0.5), lt).values
    checks["averaging.linear_in_mass"] = bool(np.max(np.abs(two - 2.0 * one)) <= 1e-12 * max(np.max(np.abs(two)), 1.0))

    young = cfg.young
    checks["young.sewing_zero"] = sewing_residual(TIME_ONLY, path, 0.0, T, young.p, young.q, young.eta)["lhs"] == 0.0
    errors = [abs(nly_solve_euler(LINEAR_IN_Y, 1.0, Grid(1.0, n)).values[-1] - math.e) for n in (64, 256)]
    checks["young.euler_first_order"] = errors[0] / errors[1] >= 3.0

    zero = skew_fbm(0.0, H, grid, RngSeed(cfg.seed), path=path)
    checks["solver.zero_drift_exact"] = bool(np.array_equal(zero.x.values, path.values))
    skew = skew_fbm(1.0, H, grid, RngSeed(cfg.seed), path=path)
    checks["solver.decomposition"] = skew.decomposition_defect() == 0.0
    checks["solver.monotone"] = skew.is_monotone()

    operators = Lab7Operators()
    constant_path = SamplePath(grid, np.full(grid.n_steps + 1, 1.0))
    checks["fracops.annihilates_constants"] = float(np.max(np.abs(fbm_to_bm(constant_path, H).values))) <= ANNIHILATION_TOL
    checks["fracops.causal"] = operators.truncation_gap(path, H, grid.n_steps // 2) <= ANNIHILATION_TOL
    checks["fracops.half_is_identity"] = bool(np.array_equal(fbm_to_bm(path, 0.5).values, path.values))
    return {name: bool(ok) for name, ok in checks.items()}


@experiment("invariant-suite", "exact and near-exact invariants of every station at small sizes")
def run_invariant_suite(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    checks = _invariant_checks(cfg)
    failed = sorted(name for name, ok in checks.items() if not ok)
    for name in failed:
        logger.warning(f"[LAB-9 (Harness)] ⚠️ invariant failed: {name}")
    metrics = {"n_checks": len(checks), "n_failed": len(failed), "failed": failed}
    frame = pd.DataFrame({"check": list(checks), "passed": list(checks.values())})
    return ExperimentResult(metrics, {"checks": checks, **metrics}, {"checks.csv": frame}, not failed)


@experiment("regime-map", "well-posedness regimes over an (H, beta) lattice at fixed p")
def run_regime_map(cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    spec = cfg.regime_map
    rows = []
    for H in spec.h_values:
        for beta in spec.beta_values:
            regime = lab_rules.classify_regime(H, beta, spec.p)
            rows.append({"H": H, "beta": beta, "p": spec.p, "regime": regime["label"],
                         "value": regime["drift_part_exponent"]})
    frame = pd.DataFrame.from_records(rows, columns=["H", "beta", "p", "regime", "value"])
    counts = {label: int(n) for label, n in frame["regime"].value_counts().sort_index().items()}
    metrics = {"points": len(rows), "counts": counts}
    return ExperimentResult(metrics, {**metrics, "p": spec.p}, {"regime_map.csv": frame}, True)


# ═══════════════════════════════════════════════════════════════════════════════
# CONFIG LOADING
# ═══════════════════════════════════════════════════════════════════════════════
def load_config(path: str, seed_override: int | None = None) -> ExperimentConfig:
    """Parse, validate and cross-check one YAML config; raises ConfigError with {loc, msg} issues."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}", [{"loc": "file", "msg": str(e)}]) from e
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else "unknown position"
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(f"YAML parse error at {where}: {problem}", [{"loc": where, "msg": problem}]) from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values", [{"loc": "", "msg": "not a mapping"}])
    if seed_override is not None:
        raw["seed"] = seed_override
    try:
        cfg = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        issues = [{"loc": ".".join(str(part) for part in err["loc"]), "msg": err["msg"]} for err in e.errors()]
        raise ConfigError(f"{len(issues)} invalid field(s) in {path}", issues) from e
    issues = cross_field_issues(cfg)
    if issues:
        raise ConfigError(f"{len(issues)} cross-field rule(s) violated in {path}", issues)
    return cfg


def validate(path: str) -> dict:
    """Schema and cross-field checks without running anything."""
    try:
        cfg = load_config(path)
    except ConfigError as e:
        for issue in e.issues:
            logger.warning(f"[LAB-9 (Harness)] ⚠️ {issue['loc']}: {issue['msg']}")
        return {"ok": False, "error": str(e), "issues": e.issues, "warnings": []}
    logger.info(f"[LAB-9 (Harness)] ✅ {path} is a valid '{cfg.experiment}' config")
    return {"ok": True, "experiment": cfg.experiment, "issues": [], "warnings": config_warnings(cfg),
            "config_hash": config_hash(cfg.canonical())}


def list_experiments() -> list[dict[str, str]]:
    return [{"name": name, "summary": EXPERIMENT_SUMMARIES[name]} for name in EXPERIMENTS]


# ═══════════════════════════════════════════════════════════════════════════════
# RUN
# ═══════════════════════════════════════════════════════════════════════════════
def run(cfg: ExperimentConfig, out_dir: str, threads: int = 1) -> tuple[dict, RunStatus]:
    """Run one experiment and archive it; returns (manifest, status)."""
    archivist = Lab8Archivist()
    config = cfg.canonical()
    out_dir = resolve_output_dir(out_dir)
    started = time.perf_counter()
    try:
        warnings = config_warnings(cfg)
        result = EXPERIMENT_REGISTRY[cfg.experiment](cfg, threads)
        status = RunStatus.SUCCESS if result.passed else RunStatus.THRESHOLD_FAILURE
        report = {**result.report, "experiment": cfg.experiment, "passed": result.passed,
                  "warnings": list(dict.fromkeys(warnings + result.warnings))}
        artifacts = {**result.artifacts, REPORT_NAME: report}
        manifest = archivist.archive_run(out_dir, config, artifacts, {**result.metrics, "passed": result.passed},
                                         status, time.perf_counter() - started, cfg.regime())
    except Exception as e:
        logger.error(f"[LAB-9 (Harness)] ❌ experiment '{cfg.experiment}' raised {type(e).__name__}: {e}")
        return archivist.archive_failure(out_dir, config, e, time.perf_counter() - started), RunStatus.ERROR
    return manifest, status


class Lab9Harness:
    task_description = "Experiment configs, battery runs & exit status"

    def __init__(self, threads: int = 1):
        self.role = "LAB-9 (Harness)"
        self.threads = max(1, int(threads))

    def validate(self, path: str) -> dict:
        return validate(path)

    @report_activity
    def run(self, cfg: ExperimentConfig, out_dir: str) -> tuple[dict, RunStatus]:
        logger.info(f"[{self.role}] Running '{cfg.experiment}' (H={cfg.hurst}, n={cfg.grid.n_steps}, "
                    f"paths={cfg.n_paths}, threads={self.threads})...")
        manifest, status = run(cfg, out_dir, self.threads)
        mark = {RunStatus.SUCCESS: "✅", RunStatus.THRESHOLD_FAILURE: "⚠️"}.get(status, "❌")
        logger.info(f"[{self.role}] {mark} '{cfg.experiment}' finished with status {status.value}")
        return manifest, status

    def run_file(self, path: str, out_dir: str, seed_override: int | None = None) -> tuple[dict, RunStatus]:
        """Load the config and run it; an invalid config leaves a failure manifest in out_dir."""
        try:
            cfg = load_config(path, seed_override)
        except ConfigError as e:
            for issue in e.issues:
                logger.error(f"[{self.role}] ❌ {issue['loc']}: {issue['msg']}")
            return Lab8Archivist().archive_failure(resolve_output_dir(out_dir), None, e, 0.0), RunStatus.ERROR
        return self.run(cfg, out_dir)
