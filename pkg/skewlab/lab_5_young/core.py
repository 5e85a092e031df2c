"""
Lab_5_Young: nonlinear Young integration in p-variation.
Riemann sums Σ A_{t_i,t_{i+1}}(x_{t_i}) along dyadic refinements, the sewing and
stability bounds, exact p-variation by dynamic programming and the forward
Euler scheme for x_t = x_0 + ∫_0^t A_{dr}(x_r).
"""
from __future__ import annotations

import math
import logging
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from scipy import stats

from ..lab_1_fbm.core import Grid, SamplePath
from ..shared import lab_rules
from ..shared.errors import DivergenceError, DomainError, EstimationError, PreconditionError, WindowError
from ..shared.utils import PathLabel, report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-5")

CAUCHY_TOLERANCE = 1e-10
MAX_DP_POINTS = 129
SEMINORM_Y_POINTS = 65
WINDOW_SLACK = 1e-12


# ═══════════════════════════════════════════════════════════════════════════════
# p-VARIATION & HÖLDER NORMS
# ═══════════════════════════════════════════════════════════════════════════════
def pvar_dp(n_points: int, distances: Callable[[int], np.ndarray], p: float) -> np.ndarray:
    """best[i] = max_{j<i} best[j] + d(j, i)^p; ``distances(i)`` returns d(·, i) on 0..i−1."""
    best = np.zeros(n_points)
    for i in range(1, n_points):
        best[i] = np.max(best[:i] + distances(i) ** p)
    return best


def pvar_seminorm(path, p: float) -> float:
    """Exact p-variation over all sub-partitions of the sampling grid."""
    if p < 1:
        raise DomainError(f"p-variation needs p >= 1, got {p}")
    x = np.asarray(getattr(path, "values", path), dtype=float)
    if x.size < 2:
        return 0.0
    best = pvar_dp(x.size, lambda i: np.abs(x[i] - x[:i]), p)
    return float(best[-1] ** (1.0 / p))


def holder_seminorm(values: np.ndarray, dx: float, exponent: float, dyadic: bool = False) -> float:
    """max_{h} max_x |f(x+h) − f(x)| / h^exponent, over all lags or dyadic ones."""
    values = np.asarray(values, dtype=float)
    m = values.size
    if m < 2:
        return 0.0
    lags = [2**i for i in range(int(math.log2(m - 1)) + 1)] if dyadic else range(1, m)
    return float(max(np.max(np.abs(values[h:] - values[:-h])) / (h * dx) ** exponent for h in lags))


def holder_norm(values: np.ndarray, dx: float, exponent: float, dyadic: bool = False) -> float:
    """‖f‖_{C^η} = sup|f| + [f]_η on the sampled points."""
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values))) + holder_seminorm(values, dx, exponent, dyadic)


def coarse_indices(k0: int, k1: int, max_points: int = MAX_DP_POINTS) -> np.ndarray:
    return np.unique(np.round(np.linspace(k0, k1, min(k1 - k0 + 1, max_points))).astype(int))


@dataclass
class ControlEstimate:
    """ϰ(s, t) on pairs of a (possibly coarsened) index set; ϰ(r, r) = 0."""
    indices: np.ndarray
    values: np.ndarray

    @classmethod
    def from_path(cls, path, p: float, max_points: int = 65) -> "ControlEstimate":
        """ϰ(s, t) = [x]^p_{p-var,[s,t]} over partitions drawn from the index set."""
        x = np.asarray(getattr(path, "values", path), dtype=float)
        idx = coarse_indices(0, x.size - 1, max_points)
        xs = x[idx]
        n = idx.size
        values = np.zeros((n, n))
        for a in range(n):
            seg = xs[a:]
            values[a, a:] = pvar_dp(seg.size, lambda i: np.abs(seg[i] - seg[:i]), p)
        return cls(idx, values)

    def superadditivity_defect(self) -> float:
        """max over r ≤ u ≤ v of ϰ(r,u) + ϰ(u,v) − ϰ(r,v); ≤ 0 for a control."""
        k = self.values
        n = k.shape[0]
        worst = -math.inf
        for u in range(n):
            lhs = k[: u + 1, u][:, None] + k[u, u:][None, :]
            worst = max(worst, float(np.max(lhs - k[: u + 1, u:])))
        return worst


# ═══════════════════════════════════════════════════════════════════════════════
# AVERAGING FUNCTIONALS
# ═══════════════════════════════════════════════════════════════════════════════
@dataclass(frozen=True, eq=False)
class AveragingFunctional:
    """A_t(y) with increments A_{s,t} = A_t − A_s.

    analytic: ``fn(t, y)`` gives A_t(y).
    tabulated: an averaged field (time_grid, space_grid, values) read with
    linear interpolation between cell centres.
    """
    kind: str
    fn: Callable | None = None
    table: Any = None
    rebuild: Callable[[float], "AveragingFunctional"] | None = None
    name: str = ""

    @classmethod
    def analytic(cls, fn: Callable, name: str = "analytic") -> "AveragingFunctional":
        return cls("analytic", fn=fn, name=name)

    @classmethod
    def tabulated(cls, table, rebuild: Callable | None = None, name: str = "tabulated") -> "AveragingFunctional":
        return cls("tabulated", table=table, rebuild=rebuild, name=name)

    def window(self) -> tuple[float, float] | None:
        if self.kind == "analytic":
            return None
        centers = self.table.space_grid.centers
        return float(centers[0]), float(centers[-1])

    def _time_factor(self, grid: Grid) -> int:
        own = self.table.time_grid
        factor = own.n_steps // grid.n_steps
        if own.t_end != grid.t_end or factor * grid.n_steps != own.n_steps:
            raise DomainError(f"tabulated functional on {own} cannot be read on {grid}")
        return factor

    def level(self, k, y, grid: Grid) -> np.ndarray:
        """A_{t_k}(y) for grid indices k (broadcast against y)."""
        k = np.asarray(k)
        y = np.asarray(y, dtype=float)
        if self.kind == "analytic":
            return np.asarray(self.fn(k * grid.dt, y), dtype=float) + np.zeros(np.broadcast(k, y).shape)
        rows = k * self._time_factor(grid)
        space = self.table.space_grid
        c0, dx, m = space.x_min + 0.5 * space.dx, space.dx, space.m_cells
        u = (y - c0) / dx
        if np.any(u < -WINDOW_SLACK) or np.any(u > m - 1 + WINDOW_SLACK):
            raise WindowError(f"argument left the tabulated window [{c0}, {c0 + (m - 1) * dx}]")
        j = np.clip(np.floor(u).astype(np.int64), 0, m - 2)
        w = np.clip(u - j, 0.0, 1.0)
        vals = self.table.values
        rows, j, w = np.broadcast_arrays(rows, j, w)
        return vals[rows, j] * (1.0 - w) + vals[rows, j + 1] * w

    def increment(self, k0, k1, y, grid: Grid) -> np.ndarray:
        return self.level(k1, y, grid) - self.level(k0, y, grid)

    def summary(self) -> dict:
        return {"kind": self.kind, "name": self.name, "window": self.window()}


def _partition(k0: int, k1: int, level: int) -> np.ndarray:
    return np.unique(np.round(np.linspace(k0, k1, 2**level + 1)).astype(int))


def riemann_sum(A: AveragingFunctional, x: np.ndarray, grid: Grid, points: np.ndarray) -> float:
    a, b = points[:-1], points[1:]
    return float(np.sum(A.increment(a, b, x[a], grid)))


def nly_integral(A: AveragingFunctional, x: SamplePath, s: float, t: float,
                 levels: int | None = None) -> tuple[float, list[float]]:
    """∫_s^t A_{dr}(x_r) as the limit of dyadic Riemann sums.

    Returns the finest sum and the Cauchy trace |S_{k+1} − S_k|; refinement stops
    below 1e−10 or when the partition reaches the grid.
    """
    grid = x.grid
    k0, k1 = grid.index_of(s), grid.index_of(t)
    if k1 < k0:
        raise DomainError(f"nly_integral needs s <= t, got s={s}, t={t}")
    if k1 == k0:
        return 0.0, []
    depth = math.ceil(math.log2(k1 - k0))
    if levels is not None:
        depth = min(depth, levels)
    trace: list[float] = []
    previous = riemann_sum(A, x.values, grid, _partition(k0, k1, 0))
    for level in range(1, depth + 1):
        current = riemann_sum(A, x.values, grid, _partition(k0, k1, level))
        trace.append(abs(current - previous))
        previous = current
        if trace[-1] < CAUCHY_TOLERANCE:
            break
    return previous, trace


def _difference_sum(A: AveragingFunctional, grid: Grid, k0: int, k1: int, x: np.ndarray, y: np.ndarray) -> float:
    """Σ_i [A_{t_i,t_{i+1}}(x_{t_i}) − A_{t_i,t_{i+1}}(y_i)] on the full grid."""
    a = np.arange(k0, k1)
    return float(np.sum(A.increment(a, a + 1, x[a], grid) - A.increment(a, a + 1, y[a] if np.ndim(y) else y, grid)))


def functional_pvar(A: AveragingFunctional, grid: Grid, k0: int, k1: int, p: float, eta: float,
                    y_grid: np.ndarray) -> float:
    """[A]_{p-var,[s,t]} with values in C^η on y_grid (coarsened time partition)."""
    if k1 <= k0:
        return 0.0
    idx = coarse_indices(k0, k1)
    levels = np.stack([A.level(k, y_grid, grid) for k in idx])
    dy = float(y_grid[1] - y_grid[0])
    best = pvar_dp(idx.size, lambda i: np.array([holder_norm(levels[i] - levels[j], dy, eta, dyadic=True)
                                                  for j in range(i)]), p)
    return float(best[-1] ** (1.0 / p))


def _y_grid(A: AveragingFunctional, *paths: np.ndarray) -> np.ndarray:
    lo = min(float(np.min(v)) for v in paths)
    hi = max(float(np.max(v)) for v in paths)
    pad = 0.1 * (hi - lo) + 1e-3
    lo, hi = lo - pad, hi + pad
    window = A.window()
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    return np.linspace(lo, hi, SEMINORM_Y_POINTS)


def sewing_residual(A: AveragingFunctional, x: SamplePath, s: float, t: float, p: float, q: float, eta: float) -> dict:
    """|∫_s^t A_{dr}(x_r) − A_{s,t}(x_s)| against [A]_{p-var}[x]^η_{q-var}."""
    if lab_rules.check_young(p, q, eta):
        raise PreconditionError(f"{lab_rules.YOUNG_CONDITION} fails: θ = {lab_rules.young_theta(p, q, eta):.4f}")
    grid = x.grid
    k0, k1 = grid.index_of(s), grid.index_of(t)
    value, trace = nly_integral(A, x, s, t)
    lhs = abs(_difference_sum(A, grid, k0, k1, x.values, np.full(grid.n_steps + 1, x.values[k0])))
    a_pvar = functional_pvar(A, grid, k0, k1, p, eta, _y_grid(A, x.values[k0:k1 + 1]))
    x_qvar = pvar_seminorm(x.values[k0:k1 + 1], q)
    rhs = a_pvar * x_qvar**eta
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio, "integral": value, "trace": trace,
            "theta": lab_rules.young_theta(p, q, eta), "A_pvar": a_pvar, "x_qvar": x_qvar}


# ═══════════════════════════════════════════════════════════════════════════════
# EQUATIONS
# ═══════════════════════════════════════════════════════════════════════════════
def _euler(A: AveragingFunctional, y0: float, grid: Grid) -> np.ndarray:
    out = np.empty(grid.n_steps + 1)
    out[0] = y0
    for k in range(grid.n_steps):
        out[k + 1] = out[k] + float(A.increment(k, k + 1, out[k], grid))
        if not math.isfinite(out[k + 1]):
            raise DivergenceError(f"Euler iterate is not finite at step {k + 1}")
    return out


def nly_solve_euler(A: AveragingFunctional, y0: float, grid: Grid, widen: float = 2.0,
                    max_widenings: int = 3) -> SamplePath:
    """x̄_{k+1} = x̄_k + A_{t_k,t_{k+1}}(x̄_k); tabulated windows are rebuilt wider on escape."""
    current = A
    for attempt in range(max_widenings + 1):
        try:
            return SamplePath(grid, _euler(current, y0, grid), PathLabel.SOLUTION)
        except WindowError as e:
            if A.rebuild is None or attempt == max_widenings:
                raise DivergenceError(f"Euler scheme left the window after {attempt} widenings: {e}") from e
            logger.warning(f"[LAB-5 (Young)] ⚠️ window escape, widening by {widen}x (attempt {attempt + 1})")
            current = A.rebuild(widen ** (attempt + 1))
    raise DivergenceError("unreachable")


def nly_residual(A: AveragingFunctional, y: SamplePath, refine: int | None = None) -> float:
    """sup_t |y_t − y_0 − ∫_0^t A_{dr}(y_r)| with the integral taken on a refined grid.

    Between grid points y follows its Euler embedding y_t = y_k + A_{t_k,t}(y_k).
    """
    grid = y.grid
    if refine is None:
        refine = 8 if A.kind == "analytic" else A._time_factor(grid)
    fine = Grid(grid.t_end, grid.n_steps * refine)
    K = np.arange(fine.n_steps + 1)
    k = np.minimum(K // refine, grid.n_steps)
    embedded = y.values[k] + A.increment(k * refine, K, y.values[k], fine)
    a = K[:-1]
    running = np.concatenate([[0.0], np.cumsum(A.increment(a, a + 1, embedded[a], fine))])
    defect = y.values - y.values[0] - running[::refine]
    return float(np.max(np.abs(defect)))


def stability_gap(A: AveragingFunctional, x: SamplePath, y: SamplePath, delta: float,
                  p: float, q: float, eta: float, s: float = 0.0, t: float | None = None) -> dict:
    """|∫A_{dr}(x_r) − ∫A_{dr}(y_r)| against the two-term stability bound."""
    lower, upper = lab_rules.stability_delta_window(p, q, eta)
    if not lower < delta < upper:
        raise PreconditionError(f"δ={delta} outside the admissible window ({lower:.4f}, {upper:.4f})")
    if x.grid != y.grid:
        raise DomainError("stability_gap needs x and y on one grid")
    grid = x.grid
    k0, k1 = grid.index_of(s), grid.index_of(grid.t_end if t is None else t)
    gap = abs(_difference_sum(A, grid, k0, k1, x.values, y.values))
    xs, ys = x.values[k0:k1 + 1], y.values[k0:k1 + 1]
    sup_diff = float(np.max(np.abs(xs - ys)))
    y_grid = _y_grid(A, xs, ys)
    a_pvar = functional_pvar(A, grid, k0, k1, p, eta, y_grid)
    a_st = holder_norm(A.increment(k0, k1, y_grid, grid), float(y_grid[1] - y_grid[0]), eta)
    spread = pvar_seminorm(xs, q) + pvar_seminorm(ys, q)
    rhs = a_pvar * spread**delta * sup_diff ** (eta - delta) + a_st * sup_diff**eta
    ratio = gap / rhs if rhs > 0 else (0.0 if gap == 0 else math.inf)
    return {"gap": gap, "rhs": rhs, "ratio": ratio, "sup_diff": sup_diff, "delta": delta,
            "delta_window": [lower, upper]}


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
class Lab5Young:
    task_description = "Nonlinear Young integrals, sewing & stability sweeps"

    def __init__(self):
        self.role = "LAB-5 (Young)"

    @report_activity
    def perturbation_sweep(self, A: AveragingFunctional, x: SamplePath, eps_list, delta: float,
                           p: float, q: float, eta: float) -> dict:
        """Gap between x and x + ε across ε, with the log-log slope."""
        rows = []
        for eps in eps_list:
            shifted = SamplePath(x.grid, x.values + eps, x.label)
            rows.append({"eps": float(eps), **stability_gap(A, x, shifted, delta, p, q, eta)})
        gaps = np.array([r["gap"] for r in rows])
        if np.any(gaps <= 0):
            raise EstimationError("perturbation sweep produced a zero gap; nothing to regress")
        fit = stats.linregress(np.log(eps_list), np.log(gaps))
        logger.info(f"[{self.role}] stability gap scales like ε^{fit.slope:.3f} (η = {eta})")
        return {"rows": rows, "slope": float(fit.slope), "eta": eta}

    @report_activity
    def corpus_ratios(self, pairs: list[tuple[AveragingFunctional, SamplePath]], p: float, q: float, eta: float) -> dict:
        ratios = [sewing_residual(A, x, 0.0, x.grid.t_end, p, q, eta)["ratio"] for A, x in pairs]
        logger.info(f"[{self.role}] sewing ratios over {len(pairs)} pairs: max {max(ratios):.4f}")
        return {"ratios": ratios, "max_ratio": float(max(ratios))}
