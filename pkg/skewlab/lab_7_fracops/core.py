"""
Lab_7_Fracops: the fractional operators linking Brownian and fractional Brownian paths.
Π̃^h, the Riemann–Liouville integral I^h, the composite
𝒜 = Π̃^{H−1/2} I^{1/2−H} Π̃^{1/2−H} (with its four-term expansion as a second
evaluation path) and the Volterra kernel route Ā back from Bm to fBm.

Every singular weight is integrated exactly over each cell against the
piecewise-linear interpolant of the data.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import signal, special, stats

from ..lab_1_fbm.core import (
    Ensemble,
    Grid,
    HurstLike,
    HurstParam,
    SamplePath,
    hurst_value,
    kernel_constant,
    volterra_transform,
)
from ..shared.errors import DomainError, EstimationError, SingularIntegralError
from ..shared.utils import PathLabel, make_rng, report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-7")

QUADRATURES = ("exact", "midpoint")
MIN_DIAGNOSTIC_PATHS = 500
VARIANCE_PROBES = 40
BM_WINDOW = {"slope": 0.05, "rho": 0.05, "kurtosis": 0.3}
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class OperatorConfig:
    hurst: HurstParam
    quadrature: str = "exact"
    singular_tolerance: float = 0.0

    def __post_init__(self):
        if self.quadrature not in QUADRATURES:
            raise DomainError(f"unknown quadrature '{self.quadrature}', expected one of {QUADRATURES}")
        if self.singular_tolerance < 0:
            raise DomainError("singular_tolerance must be non-negative")

    @property
    def alpha(self) -> float:
        return 0.5 - self.hurst.H


def _config(H: HurstLike, config: OperatorConfig | None) -> OperatorConfig:
    return config if config is not None else OperatorConfig(HurstParam(hurst_value(H)))


# ═══════════════════════════════════════════════════════════════════════════════
# CELL QUADRATURE
# ═══════════════════════════════════════════════════════════════════════════════
def _positive_power(t: np.ndarray, h: float) -> np.ndarray:
    """t^h with the value 0 at t = 0 for every h."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t > 0, t**h, 0.0)


def _weighted_running_integral(h: float, values: np.ndarray, grid: Grid, quadrature: str = "exact") -> np.ndarray:
    """J_k = ∫_0^{t_k} s^{h−1} v(s) ds for each row, v piecewise linear.

    Needs v(0) = 0 whenever h ≤ 0. For h ≤ −1, v must also vanish on the first
    cell, which then contributes nothing.
    """
    edges = grid.points
    va, vb = values[:, :-1], values[:, 1:]
    if quadrature == "midpoint":
        mids = 0.5 * (edges[:-1] + edges[1:])
        cells = grid.dt * mids ** (h - 1.0) * 0.5 * (va + vb)
    else:
        # v = offset + slope·s on each cell
        slope = (vb - va) / grid.dt
        offset = va - slope * edges[:-1]
        if h == -1.0:
            slope_part = np.diff(np.log(np.where(edges > 0, edges, edges[1])))
        else:
            slope_part = np.diff(_positive_power(edges, h + 1.0)) / (h + 1.0)
        cells = offset * np.diff(_positive_power(edges, h)) / h + slope * slope_part
    if h <= -1:
        cells[:, 0] = 0.0
    out = np.zeros_like(values)
    out[:, 1:] = np.cumsum(cells, axis=1)
    return out


@functools.lru_cache(maxsize=16)
def _rl_weights(h: float, n: int, quadrature: str) -> tuple[np.ndarray, np.ndarray]:
    """ω_a(d) = ∫_0^1 (d−u)^{h−1}(1−u) du and ω_b(d) = ∫_0^1 (d−u)^{h−1} u du, d = 0..n."""
    wa, wb = np.zeros(n + 1), np.zeros(n + 1)
    if quadrature == "midpoint":
        d = np.arange(1, n + 1)
        wa[1:] = wb[1:] = 0.5 * (d - 0.5) ** (h - 1.0)
        return wa, wb
    wa[1] = 1.0 / (h + 1.0)
    wb[1] = 1.0 / (h * (h + 1.0))
    if n >= 2:
        # away from the diagonal the kernel is analytic on the cell
        u = 0.5 * (_GL_NODES + 1.0)
        kernel = (np.arange(2, n + 1)[:, None] - u[None, :]) ** (h - 1.0) * (0.5 * _GL_WEIGHTS)
        wa[2:] = kernel @ (1.0 - u)
        wb[2:] = kernel @ u
    return wa, wb


# ═══════════════════════════════════════════════════════════════════════════════
# ROW OPERATORS
# ═══════════════════════════════════════════════════════════════════════════════
def pi_tilde_rows(h: float, values: np.ndarray, grid: Grid, quadrature: str = "exact",
                  singular_tolerance: float = 0.0) -> np.ndarray:
    """(Π̃^h f)(t) = t^h f(t) − h ∫_0^t s^{h−1} f(s) ds for each row of values."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if h == 0:
        return values.copy()
    if h <= -1:
        if np.any(np.abs(values[:, 0]) > singular_tolerance):
            raise SingularIntegralError(f"Π̃^{h} diverges at 0 for f(0) != 0 (h <= -1)")
        # s^{h−1}·f(s) stays integrable at 0 only if f vanishes on the first cell
        if np.any(np.abs(values[:, 1]) > singular_tolerance):
            raise SingularIntegralError(f"Π̃^{h} diverges at 0: f must vanish on [0, t_1] (h <= -1)")
    # Π̃^h annihilates constants, so only f − f(0) is integrated
    shifted = values - values[:, :1]
    out = _positive_power(grid.points, h) * shifted - h * _weighted_running_integral(h, shifted, grid, quadrature)
    out[:, 0] = 0.0
    return out


def riemann_liouville_rows(h: float, values: np.ndarray, grid: Grid, quadrature: str = "exact") -> np.ndarray:
    """(I^h f)(t_k) = Δ^h/Γ(h) Σ_d [ω_a(d) f_{k−d} + ω_b(d) f_{k−d+1}]."""
    if not 0.0 < h <= 1.0:
        raise DomainError(f"riemann_liouville needs h in (0, 1], got {h}")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = grid.n_steps
    wa, wb = _rl_weights(float(h), n, quadrature)
    if values.shape[0] == 1:
        out = (np.convolve(values[0], wa)[: n + 1] + np.convolve(values[0, 1:], wb)[: n + 1])[None, :]
    else:
        out = (signal.fftconvolve(values, wa[None, :], axes=1)[:, : n + 1]
               + signal.fftconvolve(values[:, 1:], wb[None, :], axes=1)[:, : n + 1])
    return grid.dt**h / special.gamma(h) * out


def composite_normalisation(H: HurstLike) -> float:
    """c such that c·Π̃^{H−1/2} I^{1/2−H} Π̃^{1/2−H} inverts the Volterra kernel map."""
    H = hurst_value(H)
    return 1.0 / (kernel_constant(H) * special.gamma(H + 0.5))


def fbm_to_bm_rows(values: np.ndarray, grid: Grid, H: HurstLike, config: OperatorConfig | None = None) -> np.ndarray:
    cfg = _config(H, config)
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if cfg.hurst.H == 0.5:
        return values.copy()
    alpha, q, tol = cfg.alpha, cfg.quadrature, cfg.singular_tolerance
    g = pi_tilde_rows(alpha, values, grid, q, tol)
    g = riemann_liouville_rows(alpha, g, grid, q)
    g = pi_tilde_rows(-alpha, g, grid, q, tol)
    return composite_normalisation(cfg.hurst) * g


def bm_to_fbm_rows(values: np.ndarray, grid: Grid, H: HurstLike) -> np.ndarray:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    H = hurst_value(H)
    if H == 0.5:
        return values.copy()
    return volterra_transform(np.diff(values, axis=1), grid, H)


# ═══════════════════════════════════════════════════════════════════════════════
# PATH OPERATORS
# ═══════════════════════════════════════════════════════════════════════════════
def pi_tilde(h: float, f: SamplePath, config: OperatorConfig | None = None) -> SamplePath:
    q, tol = ("exact", 0.0) if config is None else (config.quadrature, config.singular_tolerance)
    return SamplePath(f.grid, pi_tilde_rows(h, f.values, f.grid, q, tol)[0], f.label)


def riemann_liouville(h: float, f: SamplePath, config: OperatorConfig | None = None) -> SamplePath:
    q = "exact" if config is None else config.quadrature
    return SamplePath(f.grid, riemann_liouville_rows(h, f.values, f.grid, q)[0], f.label)


def fbm_to_bm(path: SamplePath, H: HurstLike, config: OperatorConfig | None = None) -> SamplePath:
    """W = 𝒜(B); H = 1/2 returns the input."""
    return SamplePath(path.grid, fbm_to_bm_rows(path.values, path.grid, H, config)[0], PathLabel.BM)


def bm_to_fbm(w: SamplePath, H: HurstLike) -> SamplePath:
    """B = Ā(W) through the sampler's own Volterra quadrature on the increments of w."""
    return SamplePath(w.grid, bm_to_fbm_rows(w.values, w.grid, H)[0], PathLabel.FBM)


def composite_decomposition(f: SamplePath, H: HurstLike, config: OperatorConfig | None = None) -> dict:
    """𝒜f as the sum of four iterated integrals, evaluated without the Π̃ shortcut.

    f1 = t^{−α} I^α(y^α f),  f2 = −α t^{−α} I^α(J),
    f3 = α ∫ s^{−α−1} I^α(y^α f),  f4 = −α² ∫ s^{−α−1} I^α(J),
    with α = 1/2 − H and J(y) = ∫_0^y x^{α−1} f(x) dx.
    """
    cfg = _config(H, config)
    grid, v = f.grid, f.values[None, :]
    if cfg.hurst.H == 0.5:
        zero = np.zeros_like(f.values)
        return {"f1": f.values.copy(), "f2": zero, "f3": zero, "f4": zero, "normalisation": 1.0,
                "total": SamplePath(grid, f.values.copy(), PathLabel.BM)}
    alpha, q = cfg.alpha, cfg.quadrature
    t = grid.points
    weighted = _positive_power(t, alpha) * v
    J = _weighted_running_integral(alpha, v, grid, q)
    I_weighted = riemann_liouville_rows(alpha, weighted, grid, q)
    I_J = riemann_liouville_rows(alpha, J, grid, q)
    t_inv = _positive_power(t, -alpha)
    parts = {
        "f1": (t_inv * I_weighted)[0],
        "f2": (-alpha * t_inv * I_J)[0],
        "f3": (alpha * _weighted_running_integral(-alpha, I_weighted, grid, q))[0],
        "f4": (-alpha**2 * _weighted_running_integral(-alpha, I_J, grid, q))[0],
    }
    c = composite_normalisation(cfg.hurst)
    total = c * (parts["f1"] + parts["f2"] + parts["f3"] + parts["f4"])
    return {**parts, "normalisation": c, "total": SamplePath(grid, total, PathLabel.BM)}


def boundedness_ratio(f: SamplePath, H: HurstLike, config: OperatorConfig | None = None) -> float:
    """‖𝒜f‖_∞ / (T^{1/2−H} ‖f‖_∞); 0 for the zero path."""
    H = hurst_value(H)
    sup_f = float(np.max(np.abs(f.values)))
    if sup_f == 0:
        return 0.0
    out = fbm_to_bm(f, H, config)
    return float(np.max(np.abs(out.values))) / (f.grid.t_end ** (0.5 - H) * sup_f)


# ═══════════════════════════════════════════════════════════════════════════════
# DIAGNOSTICS
# ═══════════════════════════════════════════════════════════════════════════════
def gaussianity_diagnostic(paths: Sequence[SamplePath], stride: int = 1, min_paths: int = MIN_DIAGNOSTIC_PATHS) -> dict:
    """Brownian-law checks on an ensemble read every ``stride`` grid steps.

    Variance regression log Var(X_t) on log t, pooled lag-1 correlation of the
    standardised increments, and their kurtosis (3 for a Gaussian).
    """
    if len(paths) < min_paths:
        raise EstimationError(f"gaussianity diagnostic needs >= {min_paths} paths, got {len(paths)}")
    grid = paths[0].grid
    if stride < 1 or grid.n_steps // stride < 3:
        raise EstimationError(f"stride {stride} leaves fewer than 3 increments on {grid}")
    values = np.stack([p.values for p in paths])[:, ::stride]
    t = grid.points[::stride]
    inc = np.diff(values, axis=1)
    var = values[:, 1:].var(axis=0)
    spread = inc.std(axis=0)
    report = {"n_paths": len(paths), "stride": stride, "window": BM_WINDOW}
    if not np.any(var > 0) or not np.any(spread > 0):
        logger.warning("[LAB-7 (Operators)] ⚠️ constant ensemble: gaussianity diagnostic is degenerate")
        return {**report, "degenerate": True, "passes": False, "variance_slope": math.nan,
                "lag1_correlation": math.nan, "kurtosis": math.nan}
    # log-spaced probes so early times do not dominate the leverage
    probes = np.unique(np.round(np.geomspace(1, var.size, VARIANCE_PROBES)).astype(int)) - 1
    probes = probes[var[probes] > 0]
    fit = stats.linregress(np.log(t[1:][probes]), np.log(var[probes]))
    z = inc[:, spread > 0] / spread[spread > 0]
    rho = float(np.corrcoef(z[:, :-1].ravel(), z[:, 1:].ravel())[0, 1]) if z.shape[1] >= 2 else math.nan
    kurtosis = float(stats.kurtosis(z.ravel(), fisher=False))
    passes = (abs(fit.slope - 1.0) <= BM_WINDOW["slope"] and abs(rho) < BM_WINDOW["rho"]
              and abs(kurtosis - 3.0) <= BM_WINDOW["kurtosis"])
    return {**report, "degenerate": False, "passes": bool(passes), "variance_slope": float(fit.slope),
            "lag1_correlation": rho, "kurtosis": kurtosis}


def function_corpus(grid: Grid, seed: int, size: int = 50) -> list[SamplePath]:
    """Powers, trigonometric modes, smoothed steps, random walks and rough paths, cycled to ``size``."""
    t = grid.points / grid.t_end
    rng = make_rng(seed, 7)
    builders = [
        lambda i: t ** (0.1 + 0.2 * i),
        lambda i: np.sin(np.pi * (i + 1) * t),
        lambda i: np.tanh((t - 0.1 * (i % 9 + 0.5)) / (0.01 + 0.02 * i)),
        lambda i: np.concatenate([[0.0], np.cumsum(rng.standard_normal(grid.n_steps))]) / math.sqrt(grid.n_steps),
        lambda i: np.cos(2.0 * np.pi * (i + 1) * t) * np.exp(-i * t),
    ]
    return [SamplePath(grid, builders[k % len(builders)](k // len(builders))) for k in range(size)]


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
class Lab7Operators:
    task_description = "Bm ↔ fBm operator roundtrips & law diagnostics"

    def __init__(self, config: OperatorConfig | None = None):
        self.role = "LAB-7 (Operators)"
        self.config = config

    @report_activity
    def roundtrip(self, ensemble: Ensemble) -> dict:
        """‖𝒜(Ā(W)) − W‖_∞ / ‖W‖_∞ per path of a Volterra ensemble."""
        if ensemble.bm is None:
            raise DomainError("roundtrip needs the driving Brownian paths (volterra sampler)")
        grid, H = ensemble.grid, ensemble.H
        recovered = fbm_to_bm_rows(ensemble.fbm, grid, H, self.config)
        scale = np.max(np.abs(ensemble.bm), axis=1)
        errors = np.max(np.abs(recovered - ensemble.bm), axis=1) / np.where(scale > 0, scale, 1.0)
        constant = fbm_to_bm_rows(np.full((1, grid.n_steps + 1), 1.0), grid, H, self.config)
        decomposition = composite_decomposition(SamplePath(grid, ensemble.fbm[0]), H, self.config)
        direct = recovered[0]
        agreement = float(np.max(np.abs(decomposition["total"].values - direct)) / max(np.max(np.abs(direct)), 1e-300))
        report = {"median_rel_error": float(np.median(errors)), "max_rel_error": float(np.max(errors)),
                  "constant_image": float(np.max(np.abs(constant))), "decomposition_rel_gap": agreement,
                  "n_paths": int(errors.size)}
        logger.info(f"[{self.role}] ✅ roundtrip max relative error {report['max_rel_error']:.4f}, "
                    f"decomposition gap {agreement:.2e}")
        return report

    @report_activity
    def bm_law(self, ensemble: Ensemble, stride: int = 1) -> dict:
        """Gaussianity diagnostic of 𝒜 applied to every fBm path of the ensemble."""
        rows = fbm_to_bm_rows(ensemble.fbm, ensemble.grid, ensemble.H, self.config)
        report = gaussianity_diagnostic([SamplePath(ensemble.grid, r) for r in rows], stride=stride)
        status = "✅" if report["passes"] else "⚠️"
        logger.info(f"[{self.role}] {status} 𝒜(fBm) variance slope {report['variance_slope']:.3f}, "
                    f"ρ₁ {report['lag1_correlation']:.3f}, kurtosis {report['kurtosis']:.2f}")
        return report

    @report_activity
    def boundedness_corpus(self, grid: Grid, H: HurstLike, seed: int, size: int = 50) -> dict:
        ratios = [boundedness_ratio(f, H, self.config) for f in function_corpus(grid, seed, size)]
        logger.info(f"[{self.role}] boundedness ratio over {size} functions: max {max(ratios):.3f}")
        return {"ratios": ratios, "max_ratio": float(max(ratios)), "size": size}

    def truncation_gap(self, f: SamplePath, H: HurstLike, k: int) -> float:
        """sup over [0, t_k] of |𝒜f − 𝒜(f restricted to [0, t_k])|; 0 for a causal operator."""
        grid = f.grid
        if not 1 <= k <= grid.n_steps:
            raise DomainError(f"truncation index must lie in 1..{grid.n_steps}")
        short = SamplePath(Grid(k * grid.dt, k), f.values[: k + 1])
        full = fbm_to_bm(f, H, self.config).values[: k + 1]
        return float(np.max(np.abs(full - fbm_to_bm(short, H, self.config).values)))
