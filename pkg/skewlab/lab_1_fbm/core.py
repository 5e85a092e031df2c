"""
Lab_1_Fbm: fractional Brownian motion sampling and prediction laws.
Exact Cholesky and circulant-embedding samplers, the Volterra kernel K_H with
its numerically normalised constant d_H, and the conditional mean / variance
of B_t given the driving Brownian motion up to time s.
"""
from __future__ import annotations

import logging
import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate, linalg, special

from ..shared.errors import DomainError, EmbeddingError, FactorizationError
from ..shared.lab_rules import CHOLESKY_MAX_STEPS
from ..shared.utils import PathLabel, make_rng, report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-1")

EMBEDDING_TOLERANCE = 1e-10
_QUAD_OPTS = {"epsabs": 1e-14, "epsrel": 1e-12, "limit": 400}


# ═══════════════════════════════════════════════════════════════════════════════
# DOMAIN TYPES
# ═══════════════════════════════════════════════════════════════════════════════
@dataclass(frozen=True)
class Grid:
    t_end: float
    n_steps: int

    def __post_init__(self):
        if not self.t_end > 0:
            raise DomainError(f"Grid needs t_end > 0, got {self.t_end}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f"Grid needs a positive integer n_steps, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_steps + 1)

    def index_of(self, t: float) -> int:
        """Grid index of t; off-grid times are a domain error."""
        k = int(round(t / self.dt))
        if k < 0 or k > self.n_steps or abs(k * self.dt - t) > 1e-9 * max(self.dt, abs(t)):
            raise DomainError(f"time {t} is not a point of {self}")
        return k


@dataclass(frozen=True)
class HurstParam:
    H: float

    def __post_init__(self):
        if not 0.0 < self.H <= 0.5:
            raise DomainError(f"Hurst parameter must lie in (0, 1/2], got {self.H}")

    def __float__(self) -> float:
        return float(self.H)


HurstLike = Union[HurstParam, float]


def hurst_value(H: HurstLike) -> float:
    return float(H) if isinstance(H, HurstParam) else float(HurstParam(float(H)))


@dataclass(frozen=True, eq=False)
class SamplePath:
    grid: Grid
    values: np.ndarray
    label: PathLabel = PathLabel.GENERIC

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_steps + 1,):
            raise DomainError(f"path needs {self.grid.n_steps + 1} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("path values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def summary(self) -> dict:
        return {"label": self.label.value, "n_steps": self.grid.n_steps, "t_end": self.grid.t_end}


@dataclass(frozen=True, eq=False)
class PathPair:
    bm: SamplePath
    fbm: SamplePath
    hurst: HurstParam

    def __post_init__(self):
        if self.bm.grid != self.fbm.grid:
            raise DomainError("bm and fbm must share one grid")

    @property
    def grid(self) -> Grid:
        return self.bm.grid

    def is_consistent(self, atol: float = 1e-10) -> bool:
        """Re-apply the kernel quadrature to the stored increments and compare."""
        again = volterra_transform(self.bm.increments[None, :], self.grid, self.hurst.H)[0]
        return bool(np.allclose(again, self.fbm.values, rtol=0.0, atol=atol))


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream_id) < 0:
            raise DomainError(f"stream_id must be non-negative, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        return make_rng(int(self.seed), int(self.stream_id))

    def child(self, stream_id: int) -> "RngSeed":
        return RngSeed(self.seed, stream_id)


# ═══════════════════════════════════════════════════════════════════════════════
# COVARIANCE & KERNEL
# ═══════════════════════════════════════════════════════════════════════════════
def fbm_covariance(s, t, H: HurstLike):
    """½(t^{2H} + s^{2H} − |t−s|^{2H}); broadcasts over arrays."""
    h2 = 2.0 * hurst_value(H)
    s_arr, t_arr = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
    if np.any(s_arr < 0) or np.any(t_arr < 0):
        raise DomainError("fbm_covariance needs non-negative times")
    cov = 0.5 * (t_arr**h2 + s_arr**h2 - np.abs(t_arr - s_arr) ** h2)
    return float(cov) if cov.ndim == 0 else cov


def _tail_integral(tau, H: float):
    """β_H(τ) = ∫_1^τ z^{H−3/2}(z−1)^{H−1/2} dz as an incomplete beta function."""
    a, b = H + 0.5, 1.0 - 2.0 * H
    x = 1.0 - 1.0 / np.asarray(tau, dtype=float)
    return special.betainc(a, b, x) * special.beta(a, b)


def _raw_kernel(t, r, H: float):
    """Unnormalised kernel, vectorised; callers guarantee 0 < r < t."""
    t, r = np.asarray(t, dtype=float), np.asarray(r, dtype=float)
    first = (t / r) ** (H - 0.5) * (t - r) ** (H - 0.5)
    second = (0.5 - H) * r ** (H - 0.5) * _tail_integral(t / r, H)
    return first + second


def _raw_square_regularised(t: float, r: float, H: float, at: str) -> float:
    """K²·r^{1−2H} (at='zero') or K²·(t−r)^{1−2H} (at='t'), unnormalised, finite at the endpoint."""
    e = 1.0 - 2.0 * H
    if at == "zero":
        if r <= 0.0:
            return ((0.5 - H) * special.beta(H + 0.5, 1.0 - 2.0 * H)) ** 2
        return float(_raw_kernel(t, r, H)) ** 2 * r**e
    if r >= t:
        return 1.0
    return float(_raw_kernel(t, r, H)) ** 2 * (t - r) ** e


def _raw_square_integral(a: float, b: float, t: float, H: float) -> float:
    """∫_a^b K_raw(t, r)² dr with the r^{2H−1} / (t−r)^{2H−1} endpoint behaviour in the weight."""
    e = 1.0 - 2.0 * H
    if a == 0.0 and b == t:
        mid = 0.5 * t
        return _raw_square_integral(0.0, mid, t, H) + _raw_square_integral(mid, t, t, H)
    if a == 0.0:
        val, _ = integrate.quad(lambda r: _raw_square_regularised(t, r, H, "zero"), a, b,
                                weight="alg", wvar=(-e, 0.0), **_QUAD_OPTS)
        return val
    if b == t:
        val, _ = integrate.quad(lambda r: _raw_square_regularised(t, r, H, "t"), a, b,
                                weight="alg", wvar=(0.0, -e), **_QUAD_OPTS)
        return val
    val, _ = integrate.quad(lambda r: float(_raw_kernel(t, r, H)) ** 2, a, b, **_QUAD_OPTS)
    return val


@functools.lru_cache(maxsize=64)
def kernel_constant(H: float) -> float:
    """d_H enforcing ∫_0^1 K_H(1, r)² dr = 1."""
    if H == 0.5:
        return 1.0
    d_H = 1.0 / np.sqrt(_raw_square_integral(0.0, 1.0, 1.0, H))
    logger.info(f"[LAB-1 (Sampler)] d_H({H}) = {d_H:.12f}")
    return float(d_H)


def kernel_KH(t: float, r: float, H: HurstLike) -> float:
    """K_H(t, r) with the β-integral by adaptive algebraic-weight quadrature."""
    H = hurst_value(H)
    if not 0.0 < r < t:
        raise DomainError(f"kernel_KH needs 0 < r < t, got r={r}, t={t}")
    if H == 0.5:
        return 1.0
    inner, _ = integrate.quad(lambda z: z ** (H - 1.5), r, t, weight="alg", wvar=(H - 0.5, 0.0), **_QUAD_OPTS)
    raw = (t / r) ** (H - 0.5) * (t - r) ** (H - 0.5) + (0.5 - H) * r ** (0.5 - H) * inner
    return kernel_constant(H) * raw


def kernel_KH_vec(t, r, H: HurstLike) -> np.ndarray:
    """Closed-form (incomplete beta) evaluation of K_H for arrays."""
    H = hurst_value(H)
    t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
    if np.any(r <= 0) or np.any(r >= t):
        raise DomainError("kernel_KH_vec needs 0 < r < t elementwise")
    if H == 0.5:
        return np.ones_like(t)
    return kernel_constant(H) * _raw_kernel(t, r, H)


def kernel_square_integral(a: float, b: float, t: float, H: HurstLike) -> float:
    """∫_a^b K_H(t, r)² dr for 0 ≤ a < b ≤ t, endpoint singularities in the weight."""
    H = hurst_value(H)
    if not 0.0 <= a < b <= t:
        raise DomainError(f"need 0 <= a < b <= t, got a={a}, b={b}, t={t}")
    if H == 0.5:
        return b - a
    return kernel_constant(H) ** 2 * _raw_square_integral(a, b, t, H)


# ═══════════════════════════════════════════════════════════════════════════════
# SAMPLERS
# ═══════════════════════════════════════════════════════════════════════════════
@functools.lru_cache(maxsize=1)
def _cholesky_factor(t_end: float, n_steps: int, H: float) -> np.ndarray:
    times = np.linspace(0.0, t_end, n_steps + 1)[1:]
    return cholesky_factor(fbm_covariance(times[:, None], times[None, :], H))


def cholesky_factor(covariance: np.ndarray) -> np.ndarray:
    try:
        return linalg.cholesky(covariance, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise FactorizationError(f"covariance is not positive definite: {e}") from e


def _cholesky_draw(grid: Grid, H: float, factor: np.ndarray, normals: np.ndarray) -> np.ndarray:
    out = np.zeros(normals.shape[:-1] + (grid.n_steps + 1,))
    out[..., 1:] = normals @ factor.T
    return out


def sample_fbm_cholesky(grid: Grid, H: HurstLike, seed: RngSeed, covariance: np.ndarray | None = None) -> SamplePath:
    """Exact sample from the grid covariance. A user-patched covariance may be supplied."""
    H = hurst_value(H)
    if grid.n_steps > CHOLESKY_MAX_STEPS:
        raise DomainError(f"cholesky sampler is capped at {CHOLESKY_MAX_STEPS} steps")
    factor = cholesky_factor(covariance) if covariance is not None else _cholesky_factor(grid.t_end, grid.n_steps, H)
    normals = seed.generator().standard_normal(grid.n_steps)
    return SamplePath(grid, _cholesky_draw(grid, H, factor, normals), PathLabel.FBM)


@functools.lru_cache(maxsize=8)
def circulant_sqrt_eigenvalues(n_steps: int, H: float) -> np.ndarray:
    """sqrt of the 2n-circulant eigenvalues for unit-step fractional Gaussian noise (rfft layout)."""
    h2 = 2.0 * H
    lags = np.arange(n_steps + 1, dtype=float)
    gamma = 0.5 * (np.abs(lags - 1) ** h2 - 2.0 * lags**h2 + (lags + 1) ** h2)
    row = np.concatenate([gamma, gamma[1:-1][::-1]])
    eigenvalues = np.fft.rfft(row).real
    lam_min = float(eigenvalues.min())
    if lam_min < -EMBEDDING_TOLERANCE:
        raise EmbeddingError(
            f"circulant embedding has a negative eigenvalue {lam_min:.3e} (n={n_steps}, H={H})",
            min_eigenvalue=lam_min,
        )
    return np.sqrt(np.maximum(eigenvalues, 0.0))


def _circulant_draw(grid: Grid, H: float, normals: np.ndarray) -> np.ndarray:
    n = grid.n_steps
    sqrt_eig = circulant_sqrt_eigenvalues(n, H)
    spec = np.empty(normals.shape[:-1] + (n + 1,), dtype=complex)
    spec[..., 0] = normals[..., 0]
    spec[..., n] = normals[..., 1]
    spec[..., 1:n] = (normals[..., 2 : n + 1] + 1j * normals[..., n + 1 :]) / np.sqrt(2.0)
    spec *= sqrt_eig * np.sqrt(2.0 * n)
    increments = np.fft.irfft(spec, n=2 * n, axis=-1)[..., :n] * grid.dt**H
    out = np.zeros(normals.shape[:-1] + (n + 1,))
    out[..., 1:] = np.cumsum(increments, axis=-1)
    return out


def sample_fbm_circulant(grid: Grid, H: HurstLike, seed: RngSeed) -> SamplePath:
    """Davies–Harte sample; n_steps must be a power of two."""
    H = hurst_value(H)
    n = grid.n_steps
    if n & (n - 1):
        raise DomainError(f"circulant sampler needs a power-of-two n_steps, got {n}")
    normals = seed.generator().standard_normal(2 * n)
    return SamplePath(grid, _circulant_draw(grid, H, normals), PathLabel.FBM)


@functools.lru_cache(maxsize=1)
def volterra_matrix(t_end: float, n_steps: int, H: float) -> np.ndarray:
    """Row k−1 holds the cell averages K̄_H(t_k, cell_j), j < k.

    (t−r)^{H−1/2} and r^{H−1/2} are integrated exactly over each cell; the
    remaining factors are frozen at the cell midpoint.
    """
    n = n_steps
    if H == 0.5:
        return np.tril(np.ones((n, n)))
    dt = t_end / n
    d_H = kernel_constant(H)
    a = H + 0.5
    edges = np.linspace(0.0, t_end, n + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    power_cells = (edges[1:] ** a - edges[:-1] ** a) / a
    M = np.zeros((n, n))
    for k in range(1, n + 1):
        t = edges[k]
        lo, hi, rm = edges[:k], edges[1:k + 1], mids[:k]
        lag_cells = ((t - lo) ** a - np.maximum(t - hi, 0.0) ** a) / a
        first = (t / rm) ** (H - 0.5) * lag_cells
        second = (0.5 - H) * power_cells[:k] * _tail_integral(t / rm, H)
        M[k - 1, :k] = d_H * (first + second) / dt
    return M


def volterra_transform(increments: np.ndarray, grid: Grid, H: float) -> np.ndarray:
    """B_{t_k} = Σ_{j<k} K̄_H(t_k, cell_j) ΔW_j for every row of increments."""
    increments = np.atleast_2d(increments)
    out = np.zeros((increments.shape[0], grid.n_steps + 1))
    if H == 0.5:
        out[:, 1:] = np.cumsum(increments, axis=1)
        return out
    out[:, 1:] = increments @ volterra_matrix(grid.t_end, grid.n_steps, H).T
    return out


def _pair_from_increments(grid: Grid, H: float, dW: np.ndarray) -> PathPair:
    w = np.concatenate([[0.0], np.cumsum(dW)])
    b = w.copy() if H == 0.5 else volterra_transform(dW[None, :], grid, H)[0]
    return PathPair(SamplePath(grid, w, PathLabel.BM), SamplePath(grid, b, PathLabel.FBM), HurstParam(H))


def sample_fbm_volterra(grid: Grid, H: HurstLike, seed: RngSeed) -> PathPair:
    H = hurst_value(H)
    dW = np.sqrt(grid.dt) * seed.generator().standard_normal(grid.n_steps)
    return _pair_from_increments(grid, H, dW)


# ═══════════════════════════════════════════════════════════════════════════════
# PREDICTION LAWS
# ═══════════════════════════════════════════════════════════════════════════════
def conditional_mean(pair: PathPair, s: float, t: float) -> float:
    """𝔼^s[B_t] = ∫_0^s K_H(t, r) dW_r by the sampler's own cell quadrature."""
    grid = pair.grid
    i_s, i_t = grid.index_of(s), grid.index_of(t)
    if i_s > i_t:
        raise DomainError(f"conditional_mean needs s <= t, got s={s}, t={t}")
    if i_s == 0:
        return 0.0
    if i_s == i_t:
        return float(pair.fbm.values[i_t])
    H = pair.hurst.H
    if H == 0.5:
        return float(pair.bm.values[i_s])
    row = volterra_matrix(grid.t_end, grid.n_steps, H)[i_t - 1, :i_s]
    return float(row @ pair.bm.increments[:i_s])


def conditional_variance(s: float, t: float, H: HurstLike) -> float:
    """σ²_{s,t} = ∫_s^t K_H(t, r)² dr."""
    H = hurst_value(H)
    if not 0.0 <= s < t:
        raise DomainError(f"conditional_variance needs 0 <= s < t, got s={s}, t={t}")
    if H == 0.5:
        return t - s
    return kernel_square_integral(s, t, t, H)


def two_time_variant(s: float, u: float, t: float, H: HurstLike) -> float:
    """∫_s^u K_H(t, r)² dr = Var(𝔼^u[B_t] − 𝔼^s[B_t])."""
    H = hurst_value(H)
    if not 0.0 <= s < u <= t:
        raise DomainError(f"two_time_variant needs 0 <= s < u <= t, got {s}, {u}, {t}")
    if H == 0.5:
        return u - s
    return kernel_square_integral(s, u, t, H)


def fit_local_nondeterminism(H: HurstLike, s: float = 0.5, lags: np.ndarray | None = None) -> dict:
    """Regress log σ²_{s,s+δ} on log δ; slope should be 2H, constant is reported, not assumed."""
    H = hurst_value(H)
    lags = np.logspace(-4, -2, 20) if lags is None else np.asarray(lags, dtype=float)
    variances = np.array([conditional_variance(s, s + d, H) for d in lags])
    slope, intercept = np.polyfit(np.log(lags), np.log(variances), 1)
    return {"H": H, "slope": float(slope), "fitted_constant": float(np.exp(intercept)), "n_probes": int(lags.size)}


def fit_two_time_lower_bound(H: HurstLike, triples: list[tuple[float, float, float]]) -> dict:
    """Smallest ratio ∫_s^u K² / ((u−s)(t−s)^{2H−1}) over the probe triples."""
    H = hurst_value(H)
    ratios = [two_time_variant(s, u, t, H) / ((u - s) * (t - s) ** (2 * H - 1)) for s, u, t in triples]
    return {"H": H, "fitted_constant": float(min(ratios)), "max_ratio": float(max(ratios)), "n_probes": len(ratios)}


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
SAMPLERS = ("cholesky", "circulant", "volterra")


@dataclass
class Ensemble:
    grid: Grid
    H: float
    fbm: np.ndarray
    bm: np.ndarray | None = None
    sampler: str = "volterra"
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def paths(self, which: str = "fbm") -> list[SamplePath]:
        rows = self.fbm if which == "fbm" else self.bm
        label = PathLabel.FBM if which == "fbm" else PathLabel.BM
        return [SamplePath(self.grid, row, label) for row in rows]

    def pair(self, i: int) -> PathPair:
        return PathPair(SamplePath(self.grid, self.bm[i], PathLabel.BM), SamplePath(self.grid, self.fbm[i], PathLabel.FBM), HurstParam(self.H))

    def summary(self) -> dict:
        return {"sampler": self.sampler, "n_paths": int(self.fbm.shape[0]), "n_steps": self.grid.n_steps, "H": self.H}


class Lab1Sampler:
    task_description = "fBm ensemble sampling & covariance probes"

    def __init__(self, threads: int = 1):
        self.role = "LAB-1 (Sampler)"
        self.threads = max(1, int(threads))

    def _normals(self, seed: int, n_paths: int, width: int) -> np.ndarray:
        # row i is exactly what RngSeed(seed, i) yields for a single path, whatever the worker count
        def draw(i: int) -> np.ndarray:
            return make_rng(seed, i).standard_normal(width)

        if self.threads == 1 or n_paths < 2:
            return np.stack([draw(i) for i in range(n_paths)])
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return np.stack(list(pool.map(draw, range(n_paths))))

    @report_activity
    def sample_ensemble(self, sampler: str, grid: Grid, H: HurstLike, seed: int, n_paths: int) -> Ensemble:
        H = hurst_value(H)
        logger.info(f"[{self.role}] Sampling {n_paths} paths ({sampler}, H={H}, n={grid.n_steps})...")
        if sampler == "cholesky":
            if grid.n_steps > CHOLESKY_MAX_STEPS:
                raise DomainError(f"cholesky sampler is capped at {CHOLESKY_MAX_STEPS} steps")
            factor = _cholesky_factor(grid.t_end, grid.n_steps, H)
            fbm = _cholesky_draw(grid, H, factor, self._normals(seed, n_paths, grid.n_steps))
            return Ensemble(grid, H, fbm, None, sampler, seed)
        if sampler == "circulant":
            if grid.n_steps & (grid.n_steps - 1):
                raise DomainError(f"circulant sampler needs a power-of-two n_steps, got {grid.n_steps}")
            fbm = _circulant_draw(grid, H, self._normals(seed, n_paths, 2 * grid.n_steps))
            return Ensemble(grid, H, fbm, None, sampler, seed)
        if sampler == "volterra":
            dW = np.sqrt(grid.dt) * self._normals(seed, n_paths, grid.n_steps)
            bm = np.zeros((n_paths, grid.n_steps + 1))
            bm[:, 1:] = np.cumsum(dW, axis=1)
            fbm = bm.copy() if H == 0.5 else volterra_transform(dW, grid, H)
            return Ensemble(grid, H, fbm, bm, sampler, seed)
        raise DomainError(f"unknown sampler '{sampler}', expected one of {SAMPLERS}")

    def covariance_probe_report(self, ensemble: Ensemble, probes: list[tuple[float, float]]) -> dict:
        grid, paths = ensemble.grid, ensemble.fbm
        rows = []
        for s, t in probes:
            i, j = grid.index_of(s), grid.index_of(t)
            empirical = float(np.mean(paths[:, i] * paths[:, j]))
            exact = fbm_covariance(s, t, ensemble.H)
            rows.append({"s": s, "t": t, "empirical": empirical, "exact": exact,
                         "rel_error": abs(empirical - exact) / exact})
        worst = max(r["rel_error"] for r in rows) if rows else 0.0
        logger.info(f"[{self.role}] Covariance probes: worst relative error {worst:.4f}")
        return {"probes": rows, "worst_rel_error": worst, "n_paths": int(paths.shape[0])}
