"""
Lab_6_Solver: solvers for dX = b(X)dt + dB^H and the experiment battery built on them.

Mollified drifts run explicit Euler–Maruyama on the shared Volterra fBm path.
Distributional drifts are solved path by path: local time of B, the averaging
operator T^B b, then the nonlinear Young Euler scheme for Y = X − B.
Every bundle stores X as x0 + K + B so the decomposition holds bit for bit.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import stats

from ..lab_1_fbm.core import (
    Grid,
    HurstLike,
    HurstParam,
    Lab1Sampler,
    PathPair,
    RngSeed,
    SamplePath,
    conditional_mean,
    conditional_variance,
    hurst_value,
    sample_fbm_volterra,
    volterra_transform,
)
from ..lab_2_besov.core import MOLLIFIER_FAMILIES, DriftSpec, gaussian_semigroup, mollify
from ..lab_3_localtime.core import LocalTimeField, SpaceGrid, mass_defect, occupation_density
from ..lab_4_averaging.core import averaging_via_localtime
from ..lab_5_young.core import AveragingFunctional, nly_residual, nly_solve_euler
from ..shared import lab_rules
from ..shared.errors import DivergenceError, DomainError, EstimationError, PreconditionError
from ..shared.utils import PathLabel, report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-6")

METHODS = ("mollified", "pathbypath")
DEFAULT_PAD = 1.0
# dyadic so the symmetric Dirac window has exactly mirrored cells
DEFAULT_DX = 2.0**-7
MAX_WIDENINGS = 2
MIN_SCAN_BUNDLES = 100
MIN_SCAN_LAGS = 3
REGULARITY_BAND = 0.1
SMOOTH_EXPONENT_FLOOR = 0.95


# ═══════════════════════════════════════════════════════════════════════════════
# DOMAIN TYPES
# ═══════════════════════════════════════════════════════════════════════════════
@dataclass(frozen=True)
class SolveConfig:
    """One solve: drift, Hurst index, grid, start point, method and space-window policy.

    ``n``/``family`` select the mollification level for the mollified method;
    ``pad``, ``dx`` and ``max_widenings`` set the path-by-path window.
    """
    drift: DriftSpec
    hurst: HurstParam
    grid: Grid
    x0: float = 0.0
    method: str = "mollified"
    n: int | None = None
    family: str = "gaussian"
    seed: RngSeed = field(default_factory=lambda: RngSeed(0))
    pad: float = DEFAULT_PAD
    dx: float = DEFAULT_DX
    max_widenings: int = MAX_WIDENINGS

    def __post_init__(self):
        if not isinstance(self.hurst, HurstParam):
            object.__setattr__(self, "hurst", HurstParam(float(self.hurst)))
        if self.method not in METHODS:
            raise DomainError(f"unknown method '{self.method}', expected one of {METHODS}")
        if self.method == "mollified":
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise DomainError(f"mollified method needs an integer level n >= 1, got {self.n}")
            if self.family not in MOLLIFIER_FAMILIES:
                raise DomainError(f"unknown mollifier family '{self.family}'")
        else:
            issues = lab_rules.check_pathbypath_drift(self.drift.variant, self.drift.params.get("name"))
            if issues:
                raise DomainError(issues[0]["msg"])
        if not (self.pad > 0 and self.dx > 0):
            raise DomainError("space window pad and cell width must be positive")
        if self.max_widenings < 0:
            raise DomainError("max_widenings must be non-negative")

    def method_meta(self) -> dict:
        meta = {"method": self.method, "H": self.hurst.H, "x0": self.x0, "seed": self.seed.seed,
                "stream_id": self.seed.stream_id, "drift": self.drift.summary()}
        if self.method == "mollified":
            meta.update({"n": int(self.n), "family": self.family})
        else:
            meta.update({"pad": self.pad, "dx": self.dx})
        return meta


@dataclass(frozen=True, eq=False)
class SolutionBundle:
    """X, B and K = X − B − x0 of one solve plus method metadata and diagnostics."""
    x: SamplePath
    b_path: SamplePath
    k: SamplePath
    x0: float
    method: dict
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def assemble(cls, b_path: SamplePath, k_values: np.ndarray, x0: float, method: dict,
                 diagnostics: dict | None = None) -> "SolutionBundle":
        k = SamplePath(b_path.grid, k_values, PathLabel.DRIFTPART)
        x = SamplePath(b_path.grid, x0 + k.values + b_path.values, PathLabel.SOLUTION)
        return cls(x, b_path, k, float(x0), method, diagnostics or {})

    def decomposition_defect(self) -> float:
        return float(np.max(np.abs(self.x.values - (self.x0 + self.k.values + self.b_path.values))))

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.k.values) >= 0.0))

    def summary(self) -> dict:
        return {"method": self.method.get("method"), "n_steps": self.x.grid.n_steps,
                "k_final": float(self.k.values[-1]), **self.diagnostics}


@dataclass(frozen=True, eq=False)
class BundleEnsemble:
    """Row i of ``b``/``k`` is bundle i; X is rebuilt as x0 + K + B on demand."""
    grid: Grid
    x0: float
    b: np.ndarray
    k: np.ndarray
    method: dict
    diagnostics: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.k.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.k + self.b

    def bundle(self, i: int) -> SolutionBundle:
        diag = self.diagnostics[i] if i < len(self.diagnostics) else {}
        return SolutionBundle.assemble(SamplePath(self.grid, self.b[i], PathLabel.FBM), self.k[i], self.x0,
                                       self.method, diag)

    @classmethod
    def from_bundles(cls, bundles: Sequence[SolutionBundle]) -> "BundleEnsemble":
        if not bundles:
            raise DomainError("an ensemble needs at least one bundle")
        first = bundles[0]
        return cls(first.x.grid, first.x0, np.stack([b.b_path.values for b in bundles]),
                   np.stack([b.k.values for b in bundles]), first.method,
                   [b.diagnostics for b in bundles])

    def summary(self) -> dict:
        return {"n_bundles": len(self), "n_steps": self.grid.n_steps, "method": self.method.get("method")}


BundleLike = Union[BundleEnsemble, Sequence[SolutionBundle]]


@dataclass(frozen=True)
class MollifierSchedule:
    family: str
    levels: tuple[int, ...]

    def __post_init__(self):
        if self.family not in MOLLIFIER_FAMILIES:
            raise DomainError(f"unknown mollifier family '{self.family}'")
        levels = tuple(int(n) for n in self.levels)
        if not levels or min(levels) < 1:
            raise DomainError(f"schedule levels must be integers >= 1, got {self.levels}")
        object.__setattr__(self, "levels", levels)


# ═══════════════════════════════════════════════════════════════════════════════
# MOLLIFIED DRIFTS (EULER–MARUYAMA)
# ═══════════════════════════════════════════════════════════════════════════════
def mollified_drift_part(bn: DriftSpec, x0: float, paths: np.ndarray, dt: float) -> np.ndarray:
    """K for every row of ``paths``: K_{k+1} = K_k + b^n(x0 + K_k + B_k)Δt.

    Each path is advanced independently, so one row or many give the same values.
    """
    paths = np.atleast_2d(paths)
    columns = np.ascontiguousarray(paths.T)
    k = np.zeros_like(columns)
    for step in range(columns.shape[0] - 1):
        k[step + 1] = k[step] + bn.evaluate(x0 + k[step] + columns[step]) * dt
    if not np.all(np.isfinite(k)):
        raise DivergenceError("mollified Euler–Maruyama produced a non-finite drift part")
    return np.ascontiguousarray(k.T)


def solve_mollified(cfg: SolveConfig, path: SamplePath | None = None) -> SolutionBundle:
    """Explicit Euler–Maruyama with drift b^n on the Volterra fBm path of ``cfg.seed``."""
    if cfg.method != "mollified":
        raise DomainError("solve_mollified needs a config with method 'mollified'")
    b_path = path if path is not None else sample_fbm_volterra(cfg.grid, cfg.hurst, cfg.seed).fbm
    bn = mollify(cfg.drift, int(cfg.n), cfg.family)
    k = mollified_drift_part(bn, cfg.x0, b_path.values, cfg.grid.dt)[0]
    return SolutionBundle.assemble(b_path, k, cfg.x0, cfg.method_meta(), {"route": "euler-maruyama"})


# ═══════════════════════════════════════════════════════════════════════════════
# PATH-BY-PATH ROUTES
# ═══════════════════════════════════════════════════════════════════════════════
def _table_window(values: np.ndarray, x0: float, pad: float, dx: float) -> SpaceGrid:
    """Cells over [min B − pad, max B + pad] ∪ {−x0 ± pad}; the reflected window then holds Y."""
    lo = min(float(values.min()), -x0) - pad
    hi = max(float(values.max()), -x0) + pad
    m = max(2, math.ceil((hi - lo) / dx))
    return SpaceGrid(lo, lo + m * dx, m)


def _tabulated_route(b: DriftSpec, path: SamplePath, x0: float, pad: float, dx: float,
                     max_widenings: int, diagnose: bool) -> tuple[np.ndarray, dict]:
    built: list[tuple[float, AveragingFunctional]] = []

    def build(factor: float) -> AveragingFunctional:
        lt = occupation_density(path, _table_window(path.values, x0, pad * factor, dx))
        functional = AveragingFunctional.tabulated(averaging_via_localtime(b, lt), rebuild=build, name=b.variant)
        built.append((factor, functional))
        return functional

    y = nly_solve_euler(build(1.0), x0, path.grid, widen=2.0, max_widenings=max_widenings)
    factor, functional = built[-1]
    diagnostics = {"route": "tabulated", "pad": pad * factor, "widenings": len(built) - 1,
                   "m_cells": functional.table.space_grid.m_cells}
    if diagnose:
        diagnostics["residual"] = nly_residual(functional, y)
    return y.values - x0, diagnostics


def _dirac_window(path: SamplePath, x0: float, pad: float, dx: float) -> SpaceGrid:
    half = max(float(np.max(np.abs(path.values))), abs(x0)) + pad
    m = 2 * math.ceil(half / dx)
    return SpaceGrid.symmetric(0.5 * m * dx, m)


def _reflected_hat(start: int, row: np.ndarray, y: float, x_min: float, dx: float, m: int) -> float:
    """a⁻¹·A_{t_k,t_{k+1}}(y): the step's local-time increment read at −y with hat interpolation."""
    i = math.floor((y - x_min) / dx - 0.5)
    total = 0.0
    for idx in (i - 1, i, i + 1, i + 2):
        if 0 <= idx < m:
            weight = 1.0 - abs(y - (x_min + (idx + 0.5) * dx)) / dx
            if weight > 0.0:
                j = m - 1 - idx - start
                if 0 <= j < row.size:
                    total += weight * row[j]
    return total


def _dirac_steps(a: float, lt: LocalTimeField, x0: float) -> np.ndarray | None:
    space = lt.space_grid
    x_min, dx, m = space.x_min, space.dx, space.m_cells
    edge = -x_min - 0.5 * dx
    y = np.empty(lt.time_grid.n_steps + 1)
    y[0] = x0
    for k in range(lt.time_grid.n_steps):
        start, row = lt.step_row(k)
        y[k + 1] = y[k] + a * _reflected_hat(start, row, y[k], x_min, dx, m)
        if abs(y[k + 1]) > edge:
            return None
    return y


def _dirac_route(a: float, path: SamplePath, x0: float, pad: float, dx: float,
                 max_widenings: int, diagnose: bool) -> tuple[np.ndarray, dict]:
    """T^B(aδ_0) = a·Ľ is read straight from the local-time rows, one step at a time."""
    for attempt in range(max_widenings + 1):
        current_pad = pad * 2.0**attempt
        lt = occupation_density(path, _dirac_window(path, x0, current_pad, dx))
        y = _dirac_steps(a, lt, x0)
        if y is not None:
            break
        logger.warning(f"[LAB-6 (Solver)] ⚠️ Y left the window, doubling the pad (attempt {attempt + 1})")
    else:
        raise DivergenceError(f"Y left the Dirac window after {max_widenings} widenings")
    diagnostics = {"route": "dirac-local-time", "pad": current_pad, "widenings": attempt,
                   "m_cells": lt.space_grid.m_cells, "occupation_mass_defect": mass_defect(lt)}
    if diagnose:
        functional = AveragingFunctional.tabulated(averaging_via_localtime(DriftSpec.dirac(a), lt), name="dirac")
        diagnostics["residual"] = nly_residual(functional, SamplePath(path.grid, y))
    return y - x0, diagnostics


def _pathbypath_drift_part(cfg: SolveConfig, path: SamplePath, diagnose: bool) -> tuple[np.ndarray, dict]:
    if cfg.drift.variant == "dirac":
        return _dirac_route(cfg.drift.params["mass"], path, cfg.x0, cfg.pad, cfg.dx, cfg.max_widenings, diagnose)
    return _tabulated_route(cfg.drift, path, cfg.x0, cfg.pad, cfg.dx, cfg.max_widenings, diagnose)


def solve_pathbypath(cfg: SolveConfig, path: SamplePath | None = None, diagnose: bool = True) -> SolutionBundle:
    """Y = X − B solves y_t = x0 + ∫ T^B_{dr} b(y_r); X = x0 + K + B with K = Y − x0.

    ``path`` replaces the sampled fBm (coupled comparisons); ``diagnose`` adds the
    Euler residual of Y against the tabulated averaging functional.
    """
    if cfg.method != "pathbypath":
        raise DomainError("solve_pathbypath needs a config with method 'pathbypath'")
    b_path = path if path is not None else sample_fbm_volterra(cfg.grid, cfg.hurst, cfg.seed).fbm
    k, diagnostics = _pathbypath_drift_part(cfg, b_path, diagnose)
    return SolutionBundle.assemble(b_path, k, cfg.x0, cfg.method_meta(), diagnostics)


def solve(cfg: SolveConfig, path: SamplePath | None = None) -> SolutionBundle:
    if cfg.method == "mollified":
        return solve_mollified(cfg, path)
    return solve_pathbypath(cfg, path)


def skew_fbm(a: float, H: HurstLike, grid: Grid, seed: RngSeed, x0: float = 0.0,
             path: SamplePath | None = None, pad: float = DEFAULT_PAD, dx: float = DEFAULT_DX) -> SolutionBundle:
    """a-skew fBm: X = x0 + a·L_t(−Y) + B, solved through the reflected local time of B."""
    H = hurst_value(H)
    warnings = lab_rules.regime_warnings("skew", H, 0.0, 1.0)
    cfg = SolveConfig(DriftSpec.dirac(a), HurstParam(H), grid, x0, "pathbypath", seed=seed, pad=pad, dx=dx)
    bundle = solve_pathbypath(cfg, path)
    bundle.diagnostics["warnings"] = warnings
    return bundle


# ═══════════════════════════════════════════════════════════════════════════════
# DIAGNOSTICS
# ═══════════════════════════════════════════════════════════════════════════════
def _seed_paths(grid: Grid, H: float, seeds: Sequence[int]) -> np.ndarray:
    dW = np.sqrt(grid.dt) * np.stack([RngSeed(int(s)).generator().standard_normal(grid.n_steps) for s in seeds])
    return volterra_transform(dW, grid, H)


def uniqueness_diagnostic(b: DriftSpec, H: HurstLike, grid: Grid, seeds: Sequence[int],
                          family_a: MollifierSchedule, family_b: MollifierSchedule, x0: float = 0.0) -> dict:
    """sup_t |X^A − X^B| per seed at matched levels of two mollifier schedules on the same fBm paths."""
    if len(family_a.levels) != len(family_b.levels):
        raise DomainError("mollifier schedules need the same number of levels")
    if len(seeds) == 0:
        raise DomainError("uniqueness_diagnostic needs at least one seed")
    H = hurst_value(H)
    warnings = lab_rules.regime_warnings("uniqueness", H, b.besov_meta.s, b.besov_meta.p)
    paths = _seed_paths(grid, H, seeds)
    sup_b = float(np.median(np.max(np.abs(paths), axis=1)))
    rows = []
    for n_a, n_b in zip(family_a.levels, family_b.levels):
        k_a = mollified_drift_part(mollify(b, n_a, family_a.family), x0, paths, grid.dt)
        k_b = mollified_drift_part(mollify(b, n_b, family_b.family), x0, paths, grid.dt)
        distances = np.max(np.abs(k_a - k_b), axis=1)
        q10, median, q90 = np.quantile(distances, [0.1, 0.5, 0.9])
        rows.append({"level_a": n_a, "level_b": n_b, "median": float(median), "q10": float(q10),
                     "q90": float(q90), "mean": float(distances.mean()), "max": float(distances.max()),
                     "distances": distances.tolist()})
    medians = [r["median"] for r in rows]
    report = {
        "families": [family_a.family, family_b.family], "seeds": [int(s) for s in seeds], "rows": rows,
        "median_sup_b": sup_b,
        "strictly_decreasing": all(m2 < m1 for m1, m2 in zip(medians, medians[1:])),
        "final_relative": medians[-1] / sup_b if sup_b > 0 else math.nan,
        "boundary": H == lab_rules.PATHWISE_UNIQUENESS_H,
        "warnings": warnings,
    }
    # empirical rate only; no theoretical rate is asserted
    if len(rows) >= 2 and all(m > 0 for m in medians):
        report["empirical_rate"] = float(-np.polyfit(np.log(family_a.levels), np.log(medians), 1)[0])
    return report


def _default_scan_lags(n: int) -> list[int]:
    lags, h = [], 8
    while h <= n // 4:
        lags.append(h)
        h *= 2
    return lags


def regularity_scan(bundles: BundleLike, moment: float = 2.0, lags: Sequence[int] | None = None,
                    target: float | None = None) -> dict:
    """Slope of log E|K_{s+h} − K_s|^m against log(hΔt), divided by m.

    Anchors s run over multiples of h; the target defaults to the drift-part
    exponent 1 + min(H(β − 1/p), 0) of the ensemble's drift.
    """
    ensemble = bundles if isinstance(bundles, BundleEnsemble) else BundleEnsemble.from_bundles(list(bundles))
    if len(ensemble) < MIN_SCAN_BUNDLES:
        raise PreconditionError(f"regularity_scan needs at least {MIN_SCAN_BUNDLES} bundles, got {len(ensemble)}")
    if not moment > 0:
        raise DomainError(f"moment must be positive, got {moment}")
    n = ensemble.grid.n_steps
    lags = sorted({int(h) for h in (lags if lags is not None else _default_scan_lags(n))})
    if any(h < 1 or h > n for h in lags):
        raise DomainError(f"lags must lie within 1..{n}, got {lags}")
    if len(lags) < MIN_SCAN_LAGS:
        raise EstimationError(f"regularity_scan needs at least {MIN_SCAN_LAGS} lags, got {len(lags)}")
    k = ensemble.k
    moments = np.array([np.mean(np.abs(k[:, h::h] - k[:, :n + 1 - h:h]) ** moment) for h in lags])
    if target is None and "H" in ensemble.method:
        meta = ensemble.method.get("drift", {}).get("besov_meta", {})
        if meta:
            target = lab_rules.drift_part_exponent(ensemble.method["H"], meta["s"], meta["p"])
    report = {"moment": moment, "lags": lags, "moments": moments.tolist(), "n_bundles": len(ensemble),
              "target": target, "degenerate": bool(np.any(moments <= 0.0))}
    if report["degenerate"]:
        logger.warning("[LAB-6 (Solver)] ⚠️ K is constant at some lag; regression skipped")
        report.update({"slope": math.nan, "exponent": math.nan, "within_band": False})
        return report
    fit = stats.linregress(np.log(np.asarray(lags) * ensemble.grid.dt), np.log(moments))
    exponent = float(fit.slope) / moment
    if target is None:
        within = False
    elif target >= 1.0:
        within = exponent >= SMOOTH_EXPONENT_FLOOR
    else:
        within = abs(exponent - target) <= REGULARITY_BAND
    report.update({"slope": float(fit.slope), "exponent": exponent, "r_value": float(fit.rvalue),
                   "within_band": bool(within)})
    return report


def conditional_drift_expectation(b: DriftSpec, pair: PathPair, s: float, t: float) -> float:
    """𝔼^s[b(B_t)] = G_{σ²_{s,t}} b(𝔼^s[B_t])."""
    grid = pair.grid
    i_s, i_t = grid.index_of(s), grid.index_of(t)
    mu = conditional_mean(pair, s, t)
    if i_s == i_t:
        if b.variant == "dirac":
            raise DomainError("a Dirac drift has no value at a known point; take s < t")
        return float(b.evaluate(mu))
    variance = conditional_variance(grid.points[i_s], grid.points[i_t], pair.hurst)
    return float(gaussian_semigroup(b, variance).evaluate(mu))


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
class Lab6Solver:
    task_description = "Skew-fBm & mollified-drift solving, uniqueness and regularity scans"

    def __init__(self, threads: int = 1):
        self.role = "LAB-6 (Solver)"
        self.threads = max(1, int(threads))

    @report_activity
    def solve(self, cfg: SolveConfig) -> SolutionBundle:
        bundle = solve(cfg)
        logger.info(f"[{self.role}] ✅ {cfg.method} solve done (K_T={bundle.k.values[-1]:.4g})")
        return bundle

    @report_activity
    def solve_ensemble(self, cfg: SolveConfig, n_paths: int, diagnose: bool = False) -> BundleEnsemble:
        """n_paths solves on substreams (cfg.seed.seed, i); row i matches solve(cfg with stream i)."""
        ensemble = Lab1Sampler(self.threads).sample_ensemble("volterra", cfg.grid, cfg.hurst, cfg.seed.seed, n_paths)
        b = ensemble.fbm
        logger.info(f"[{self.role}] Solving {n_paths} paths ({cfg.method}, {cfg.drift.variant})...")
        if cfg.method == "mollified":
            k = mollified_drift_part(mollify(cfg.drift, int(cfg.n), cfg.family), cfg.x0, b, cfg.grid.dt)
            diagnostics = [{"route": "euler-maruyama"} for _ in range(n_paths)]
        else:
            def one(i: int) -> tuple[np.ndarray, dict]:
                return _pathbypath_drift_part(cfg, SamplePath(cfg.grid, b[i], PathLabel.FBM), diagnose)

            if self.threads == 1 or n_paths < 2:
                parts = [one(i) for i in range(n_paths)]
            else:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    parts = list(pool.map(one, range(n_paths)))
            k = np.stack([p[0] for p in parts])
            diagnostics = [p[1] for p in parts]
        return BundleEnsemble(cfg.grid, cfg.x0, b, k, cfg.method_meta(), diagnostics)

    @report_activity
    def skew_battery(self, a: float, H: HurstLike, grid: Grid, seed: int, n_paths: int) -> dict:
        """a = 0 exactness, monotone K, sign antisymmetry and the frequency of K_T > 0."""
        H = hurst_value(H)
        warnings = lab_rules.regime_warnings("skew", H, 0.0, 1.0)
        ensemble = self.solve_ensemble(
            SolveConfig(DriftSpec.dirac(a), HurstParam(H), grid, 0.0, "pathbypath", seed=RngSeed(seed)), n_paths)
        zero_exact, antisymmetric = True, True
        for i in range(min(n_paths, 8)):
            path = SamplePath(grid, ensemble.b[i], PathLabel.FBM)
            zero = skew_fbm(0.0, H, grid, RngSeed(seed, i), path=path)
            zero_exact &= bool(np.array_equal(zero.x.values, path.values))
            mirrored = skew_fbm(-a, H, grid, RngSeed(seed, i), path=SamplePath(grid, -path.values, PathLabel.FBM))
            antisymmetric &= bool(np.array_equal(mirrored.x.values, -ensemble.x[i]))
        increments = np.diff(ensemble.k, axis=1)
        monotone = bool(np.all(increments >= 0.0)) if a >= 0 else bool(np.all(increments <= 0.0))
        positive = float(np.mean(np.abs(ensemble.k[:, -1]) > 0.0))
        passed = zero_exact and antisymmetric and monotone and (a == 0 or positive > 0)
        log = logger.info if passed else logger.warning
        log(f"[{self.role}] {'✅' if passed else '⚠️'} skew battery a={a}, H={H}: "
            f"zero={zero_exact}, monotone={monotone}, antisymmetric={antisymmetric}, P(K_T≠0)={positive:.3f}")
        return {"a": a, "H": H, "n_paths": n_paths, "zero_drift_exact": zero_exact, "monotone": monotone,
                "antisymmetric": antisymmetric, "positive_frequency": positive, "passed": passed,
                "warnings": warnings, "ensemble": ensemble}
