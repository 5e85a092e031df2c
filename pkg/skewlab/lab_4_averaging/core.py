"""
Lab_4_Averaging: the averaging operator T^w_t b(x) = ∫_0^t b(x + w_r) dr.
Two routes: direct time quadrature for drifts with a bounded pointwise
representative, and convolution of b with the reflected local time for every
drift, Dirac masses included.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from ..lab_1_fbm.core import Grid, SamplePath
from ..lab_2_besov.core import DriftSpec, mollify
from ..lab_3_localtime.core import LocalTimeField, SpaceGrid, occupation_density
from ..lab_5_young.core import coarse_indices, holder_norm, pvar_dp
from ..shared.errors import DomainError
from ..shared.utils import report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-4")

DIRECT_VARIANTS = ("smooth", "gaussian", "gridded")
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
ROW_CHUNK = 512


@dataclass(frozen=True, eq=False)
class AveragedField:
    """values[k, j] = T^w_{t_k} b(x_j) at the centres of space_grid."""
    time_grid: Grid
    space_grid: SpaceGrid
    values: np.ndarray
    drift_meta: DriftSpec

    def __post_init__(self):
        shape = (self.time_grid.n_steps + 1, self.space_grid.m_cells)
        if self.values.shape != shape:
            raise DomainError(f"averaged field needs shape {shape}, got {self.values.shape}")

    @property
    def x(self) -> np.ndarray:
        return self.space_grid.centers

    def summary(self) -> dict:
        return {"drift": self.drift_meta.variant, "n_steps": self.time_grid.n_steps, **self.space_grid.summary()}


# ═══════════════════════════════════════════════════════════════════════════════
# ROUTES
# ═══════════════════════════════════════════════════════════════════════════════
def averaging_direct(b: DriftSpec, path: SamplePath, space: SpaceGrid, quadrature: str = "trapezoid") -> AveragedField:
    """Time quadrature of b(x_j + w_r): trapezoid on the samples, or 8-point
    Gauss–Legendre on every linear segment of the interpolant."""
    if b.variant not in DIRECT_VARIANTS or not b.is_bounded:
        raise DomainError(f"'{b.variant}' drift has no bounded pointwise representative; "
                          "use averaging_via_localtime")
    x, w, dt = space.centers, path.values, path.grid.dt
    if quadrature == "trapezoid":
        integrand = b.evaluate(w[:, None] + x[None, :])
        values = integrate.cumulative_trapezoid(integrand, dx=dt, axis=0, initial=0.0)
    elif quadrature == "gauss":
        u = 0.5 * (_GL_NODES + 1.0)
        steps = np.zeros((path.grid.n_steps, x.size))
        for node, weight in zip(u, _GL_WEIGHTS):
            position = w[:-1] + node * (w[1:] - w[:-1])
            steps += 0.5 * weight * b.evaluate(position[:, None] + x[None, :])
        values = np.zeros((path.grid.n_steps + 1, x.size))
        values[1:] = np.cumsum(dt * steps, axis=0)
    else:
        raise DomainError(f"unknown quadrature '{quadrature}'")
    return AveragedField(path.grid, space, values, b)


def cell_kernel(b: DriftSpec, dx: float, m: int) -> np.ndarray:
    """k_d = ∫_{(d−½)Δx}^{(d+½)Δx} b for d = −(m−1)…(m−1)."""
    edges = (np.arange(-(m - 1), m + 1) - 0.5) * dx
    return b.cell_integrals(edges)


def averaging_via_localtime(b: DriftSpec, lt: LocalTimeField) -> AveragedField:
    """T_t b = b * Ľ_t on the reflected space window.

    Dirac drifts are a pure reindexing of the local time. Other drifts are
    integrated exactly over each cell against the cell-constant local time;
    increments are convolved step by step so nonnegative b gives nondecreasing
    fields without round-off exceptions.

    The cell kernel spans every offset between two cells of the reflected
    window, so the support of b may exceed the window: the field is exact on the
    window and nothing outside it is reported. No window error can arise here.
    """
    mirrored = lt.reflected()
    space = mirrored.space_grid
    if b.variant == "dirac":
        return AveragedField(lt.time_grid, space, b.params["mass"] * mirrored.mass, b)
    m = space.m_cells
    kernel = cell_kernel(b, space.dx, m)
    if b.is_nonnegative:
        kernel = np.maximum(kernel, 0.0)
    # toeplitz[j, i] = k_{i − j}
    toeplitz = linalg.toeplitz(kernel[m - 1::-1], kernel[m - 1:])
    values = np.zeros((lt.time_grid.n_steps + 1, m))
    running = np.zeros(m)
    for start in range(0, lt.time_grid.n_steps, ROW_CHUNK):
        block = mirrored.increments[start:start + ROW_CHUNK] @ toeplitz
        block = np.cumsum(np.asarray(block), axis=0) + running
        values[start + 1:start + 1 + block.shape[0]] = block
        running = block[-1]
    return AveragedField(lt.time_grid, space, values, b)


def mollified_operator_limit(b: DriftSpec, lt: LocalTimeField, n_list, family: str = "gaussian") -> dict:
    """sup-norm distance between T^w b^n (direct route) and T^w b (local-time route)."""
    if lt.path_values is None:
        raise DomainError("the local-time field does not carry its path; rebuild it with occupation_density")
    if any(b2 <= b1 for b1, b2 in zip(n_list, n_list[1:])):
        raise DomainError(f"n_list must be increasing, got {list(n_list)}")
    limit = averaging_via_localtime(b, lt)
    path = SamplePath(lt.time_grid, lt.path_values)
    scale = max(float(np.max(np.abs(limit.values))), 1e-300)
    rows = []
    for n in n_list:
        approx = averaging_direct(mollify(b, int(n), family), path, limit.space_grid, quadrature="gauss")
        distance = float(np.max(np.abs(approx.values - limit.values)))
        rows.append({"n": int(n), "distance": distance, "relative": distance / scale})
    distances = [r["distance"] for r in rows]
    return {"rows": rows, "non_increasing": all(d2 <= d1 for d1, d2 in zip(distances, distances[1:])),
            "strictly_decreasing": all(d2 < d1 for d1, d2 in zip(distances, distances[1:])),
            "window": limit.space_grid.summary()}


# ═══════════════════════════════════════════════════════════════════════════════
# REGULARITY
# ═══════════════════════════════════════════════════════════════════════════════
def _time_pairs(n: int) -> list[tuple[int, int]]:
    pairs = {(0, n)}
    h = 1
    while h <= n:
        pairs.update((k, k + h) for k in range(0, n - h + 1, h))
        h *= 2
    return sorted(pairs)


def field_regularity(field: AveragedField, gamma: float | None = None, eta: float = 0.5,
                     p_var: float | None = None, max_points: int = 65) -> dict:
    """[T]_{C^γ([0,T]; C^η)} over aligned dyadic time pairs and/or the p-variation in time
    of t ↦ T_t(·) measured in C^η (sup norm plus η-Hölder seminorm)."""
    if gamma is None and p_var is None:
        raise DomainError("field_regularity needs a time exponent gamma or a p_var index")
    if not 0 < eta < 1 or (gamma is not None and not 0 < gamma < 1):
        raise DomainError("exponents must lie in (0, 1)")
    values, dt, dx = field.values, field.time_grid.dt, field.space_grid.dx
    report: dict = {"eta": eta, "window": field.space_grid.summary()}
    if gamma is not None:
        best, where = 0.0, None
        for k0, k1 in _time_pairs(field.time_grid.n_steps):
            ratio = holder_norm(values[k1] - values[k0], dx, eta, dyadic=True) / ((k1 - k0) * dt) ** gamma
            if ratio > best:
                best, where = ratio, (k0, k1)
        report.update({"gamma": gamma, "holder_seminorm": best, "attained_at": where})
    if p_var is not None:
        idx = coarse_indices(0, field.time_grid.n_steps, max_points)
        rows = values[idx]
        best = pvar_dp(idx.size, lambda i: np.array([holder_norm(rows[i] - rows[j], dx, eta, dyadic=True)
                                                      for j in range(i)]), p_var)
        report.update({"p_var": p_var, "pvar_seminorm": float(best[-1] ** (1.0 / p_var))})
    return report


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
class Lab4Averaging:
    task_description = "Averaging operator routes & two-route cross-checks"

    def __init__(self):
        self.role = "LAB-4 (Averaging)"

    @report_activity
    def two_route_check(self, b: DriftSpec, path: SamplePath, m_cells: int, quadrature: str = "trapezoid") -> dict:
        """sup |direct − local-time| / sup |local-time| on the reflected window."""
        lt = occupation_density(path, SpaceGrid.covering(path.values, m_cells))
        via_lt = averaging_via_localtime(b, lt)
        direct = averaging_direct(b, path, via_lt.space_grid, quadrature)
        scale = float(np.max(np.abs(via_lt.values)))
        discrepancy = float(np.max(np.abs(direct.values - via_lt.values))) / scale if scale > 0 else 0.0
        logger.info(f"[{self.role}] two-route relative discrepancy {discrepancy:.2e} ({b.variant})")
        return {"relative_discrepancy": discrepancy, "scale": scale, "window": via_lt.space_grid.summary(),
                "direct": direct, "via_localtime": via_lt}
