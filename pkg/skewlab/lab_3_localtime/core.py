"""
Lab_3_LocalTime: exact occupation measures of sampled paths.
A sampled path is read as its piecewise-linear interpolant; the time it spends
in each space cell is computed from the linear crossing times, so the
occupation formula is an identity for cell-aligned test functions.
"""
from __future__ import annotations

import math
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import sparse, stats

from ..lab_1_fbm.core import Ensemble, Grid, SamplePath
from ..shared.errors import DomainError, EstimationError
from ..shared.utils import report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-3")

DEFAULT_PAD_CELLS = 3
MIN_LAGS = 4
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


# ═══════════════════════════════════════════════════════════════════════════════
# DOMAIN TYPES
# ═══════════════════════════════════════════════════════════════════════════════
@dataclass(frozen=True)
class SpaceGrid:
    x_min: float
    x_max: float
    m_cells: int

    def __post_init__(self):
        if int(self.m_cells) != self.m_cells or self.m_cells < 1:
            raise DomainError(f"SpaceGrid needs a positive integer m_cells, got {self.m_cells}")
        if not self.x_max > self.x_min:
            raise DomainError(f"zero-width cells: x_min={self.x_min}, x_max={self.x_max}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.m_cells

    @property
    def edges(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.m_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + self.dx * (np.arange(self.m_cells) + 0.5)

    def cell_of(self, x) -> np.ndarray:
        j = np.floor((np.asarray(x, dtype=float) - self.x_min) / self.dx).astype(np.int64)
        return np.clip(j, 0, self.m_cells - 1)

    def covers(self, lo: float, hi: float) -> bool:
        return self.x_min <= lo and hi <= self.x_max

    def widened_to(self, lo: float, hi: float) -> "SpaceGrid":
        """Same cell width and alignment, extended by whole cells until [lo, hi] fits."""
        dx = self.dx
        left = max(0, math.ceil((self.x_min - lo) / dx))
        right = max(0, math.ceil((hi - self.x_max) / dx))
        return SpaceGrid(self.x_min - left * dx, self.x_max + right * dx, self.m_cells + left + right)

    def reflected(self) -> "SpaceGrid":
        return SpaceGrid(-self.x_max, -self.x_min, self.m_cells)

    @classmethod
    def covering(cls, values, m_cells: int, pad_cells: int = DEFAULT_PAD_CELLS) -> "SpaceGrid":
        """[min − pad·Δx, max + pad·Δx] split into m_cells cells."""
        values = np.asarray(values, dtype=float)
        lo, hi = float(values.min()), float(values.max())
        inner = max(m_cells - 2 * pad_cells, 1)
        dx = (hi - lo) / inner if hi > lo else 1.0 / m_cells
        x_min = lo - pad_cells * dx
        return cls(x_min, x_min + m_cells * dx, m_cells)

    @classmethod
    def symmetric(cls, half_width: float, m_cells: int) -> "SpaceGrid":
        if m_cells % 2:
            raise DomainError("a symmetric space grid needs an even number of cells")
        return cls(-half_width, half_width, m_cells)

    def summary(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "m_cells": self.m_cells, "dx": self.dx}


@dataclass(frozen=True, eq=False)
class LocalTimeField:
    """L_{t_k}(x_j) stored as per-step increments.

    Row k of ``increments`` is the occupation of [t_k, t_{k+1}] per cell divided
    by Δx; each row covers one contiguous range of cells in ascending order.
    """
    time_grid: Grid
    space_grid: SpaceGrid
    increments: sparse.csr_matrix
    path_values: np.ndarray | None = None

    def __post_init__(self):
        shape = (self.time_grid.n_steps, self.space_grid.m_cells)
        if self.increments.shape != shape:
            raise DomainError(f"local-time increments need shape {shape}, got {self.increments.shape}")

    @property
    def mass(self) -> np.ndarray:
        """Dense (n_steps + 1, m_cells) cumulative field."""
        out = np.zeros((self.time_grid.n_steps + 1, self.space_grid.m_cells))
        out[1:] = np.cumsum(self.increments.toarray(), axis=0)
        return out

    def at(self, k: int) -> np.ndarray:
        if k == 0:
            return np.zeros(self.space_grid.m_cells)
        return np.asarray(self.increments[:k].sum(axis=0)).ravel()

    def between(self, k0: int, k1: int) -> np.ndarray:
        """L_{t_k0, t_k1}(·)."""
        if k1 <= k0:
            return np.zeros(self.space_grid.m_cells)
        return np.asarray(self.increments[k0:k1].sum(axis=0)).ravel()

    def column(self, j: int) -> np.ndarray:
        out = np.zeros(self.time_grid.n_steps + 1)
        out[1:] = np.cumsum(self.increments[:, j].toarray().ravel())
        return out

    def band(self, j0: int, j1: int) -> np.ndarray:
        """Cumulative mean of L over cells j0..j1 (inclusive), as a function of t_k."""
        out = np.zeros(self.time_grid.n_steps + 1)
        out[1:] = np.cumsum(np.asarray(self.increments[:, j0:j1 + 1].sum(axis=1)).ravel()) / (j1 - j0 + 1)
        return out

    def step_row(self, k: int) -> tuple[int, np.ndarray]:
        """(first cell, values) of step k; values cover a contiguous cell range."""
        a, b = self.increments.indptr[k], self.increments.indptr[k + 1]
        if a == b:
            return 0, np.zeros(0)
        return int(self.increments.indices[a]), self.increments.data[a:b]

    def total_mass(self) -> np.ndarray:
        """Σ_j L_{t_k}(x_j)Δx for every k."""
        out = np.zeros(self.time_grid.n_steps + 1)
        out[1:] = np.cumsum(np.asarray(self.increments.sum(axis=1)).ravel()) * self.space_grid.dx
        return out

    def reflected(self) -> "LocalTimeField":
        """Ľ(x) = L(−x) by index reversal; data are moved, never recomputed."""
        inc = self.increments
        counts = np.diff(inc.indptr)
        rows = np.repeat(np.arange(inc.shape[0]), counts)
        perm = inc.indptr[rows] + inc.indptr[rows + 1] - 1 - np.arange(inc.nnz)
        m = self.space_grid.m_cells
        mirrored = sparse.csr_matrix((inc.data[perm], m - 1 - inc.indices[perm], inc.indptr.copy()), shape=inc.shape)
        return LocalTimeField(self.time_grid, self.space_grid.reflected(), mirrored,
                              None if self.path_values is None else -self.path_values)

    def summary(self) -> dict:
        return {"n_steps": self.time_grid.n_steps, "t_end": self.time_grid.t_end, **self.space_grid.summary(),
                "nnz": int(self.increments.nnz)}


# ═══════════════════════════════════════════════════════════════════════════════
# OCCUPATION MEASURE
# ═══════════════════════════════════════════════════════════════════════════════
def _occupation_increments(values: np.ndarray, dt: float, space: SpaceGrid) -> sparse.csr_matrix:
    lo = np.minimum(values[:-1], values[1:])
    hi = np.maximum(values[:-1], values[1:])
    n = lo.size
    j_lo, j_hi = space.cell_of(lo), space.cell_of(hi)
    counts = j_hi - j_lo + 1
    starts = np.cumsum(counts) - counts
    rows = np.repeat(np.arange(n), counts)
    cols = np.repeat(j_lo, counts) + (np.arange(int(counts.sum())) - np.repeat(starts, counts))
    edges = space.edges
    overlap = np.clip(np.minimum(hi[rows], edges[cols + 1]) - np.maximum(lo[rows], edges[cols]), 0.0, None)
    span = (hi - lo)[rows]
    moving = span > 0
    occupied = np.where(moving, dt * overlap / np.where(moving, span, 1.0), dt)
    return sparse.csr_matrix((occupied / space.dx, cols, np.append(starts, counts.sum())), shape=(n, space.m_cells))


def occupation_density(path: SamplePath, space: SpaceGrid) -> LocalTimeField:
    """Exact local time of the piecewise-linear interpolant, accumulated over the time grid."""
    values = path.values
    lo, hi = float(values.min()), float(values.max())
    if not space.covers(lo, hi):
        space = space.widened_to(lo, hi)
    return LocalTimeField(path.grid, space, _occupation_increments(values, path.grid.dt, space), values)


def _time_integral(values: np.ndarray, dt: float, f: Callable, antiderivative: Callable | None) -> float:
    w0, w1 = values[:-1], values[1:]
    if antiderivative is not None:
        dw = w1 - w0
        moving = dw != 0
        F1, F0 = np.asarray(antiderivative(w1), dtype=float), np.asarray(antiderivative(w0), dtype=float)
        per_step = np.where(moving, (F1 - F0) / np.where(moving, dw, 1.0), np.asarray(f(w0), dtype=float))
        return float(dt * per_step.sum())
    # Gauss–Legendre on every linear segment
    u = 0.5 * (_GL_NODES + 1.0)
    points = w0[:, None] + (w1 - w0)[:, None] * u[None, :]
    vals = np.asarray(f(points), dtype=float)
    return float(dt * 0.5 * (vals * _GL_WEIGHTS[None, :]).sum())


def occupation_formula_residual(path: SamplePath, field: LocalTimeField, f: Callable,
                                t: float | None = None, antiderivative: Callable | None = None) -> float:
    """|∫_0^t f(w_r)dr − Σ_j f(x_j) L_t(x_j) Δx|.

    The time side is exact for polynomials of degree ≤ 15; pass ``antiderivative``
    for test functions that are not smooth (indicators of cell unions).
    """
    k = path.grid.n_steps if t is None else path.grid.index_of(t)
    lhs = _time_integral(path.values[: k + 1], path.grid.dt, f, antiderivative)
    centers = field.space_grid.centers
    rhs = float(np.sum(np.asarray(f(centers), dtype=float) * field.at(k)) * field.space_grid.dx)
    return abs(lhs - rhs)


def mass_defect(field: LocalTimeField) -> float:
    """max_k |Σ_j L_{t_k} Δx − t_k| / t_k."""
    t = field.time_grid.points[1:]
    return float(np.max(np.abs(field.total_mass()[1:] - t) / t))


# ═══════════════════════════════════════════════════════════════════════════════
# JOINT REGULARITY
# ═══════════════════════════════════════════════════════════════════════════════
def _dyadic_lags(n: int, first: int = 0, last_margin: int = 2) -> list[int]:
    return [2**i for i in range(first, int(math.log2(n)) - last_margin + 1)]


def occupation_median(fields: list[LocalTimeField]) -> float:
    """Median of the pooled time-averaged path positions."""
    total = np.sum([f.at(f.time_grid.n_steps) for f in fields], axis=0)
    cdf = np.cumsum(total) / total.sum()
    return float(fields[0].space_grid.centers[int(np.searchsorted(cdf, 0.5))])


def holder_exponent_scan(fields: list[LocalTimeField], mode: str = "time", moment: float = 8.0,
                         x: float | None = None, probe_width: float | None = None,
                         window: tuple[int, int] | None = None) -> dict:
    """Log-log regression of E|increment|^n against lag.

    time mode: L_{s,s+h} on a probe band around x (the occupation median by
    default); the band is a third of a typical step wide, which probes the β̄ → 0 limit
    while capping the one-step artefacts of the interpolant. Lags run from 8 steps.
    space mode: L_{s,t}(x + h) − L_{s,t}(x) at fixed (s, t), over all x.
    """
    if not fields:
        raise EstimationError("holder_exponent_scan needs at least one field")
    if moment < 1:
        raise DomainError(f"moment must be >= 1, got {moment}")
    grid, space = fields[0].time_grid, fields[0].space_grid
    if any(f.time_grid != grid or f.space_grid != space for f in fields):
        raise DomainError("ensemble fields must share one time grid and one space grid")

    if mode == "time":
        lags = _dyadic_lags(grid.n_steps, first=3)
        x = occupation_median(fields) if x is None else x
        width = probe_width or max(2.0 * space.dx, _typical_step(fields) / 3.0)
        j0, j1 = space.cell_of(x - 0.5 * width), space.cell_of(x + 0.5 * width)
        series = [f.band(int(j0), int(j1)) for f in fields]
        per_path = np.array([[np.mean(np.abs(c[h:] - c[:-h]) ** moment) for h in lags] for c in series])
        lag_values = np.array(lags) * grid.dt
        probe = {"x": x, "cells": [int(j0), int(j1)], "width": (int(j1) - int(j0) + 1) * space.dx}
    elif mode == "space":
        lags = _dyadic_lags(space.m_cells, last_margin=3)
        k0, k1 = window or (0, grid.n_steps)
        rows = [f.between(k0, k1) for f in fields]
        per_path = np.array([[np.mean(np.abs(r[h:] - r[:-h]) ** moment) for h in lags] for r in rows])
        lag_values = np.array(lags) * space.dx
        probe = {"s": k0 * grid.dt, "t": k1 * grid.dt}
    else:
        raise DomainError(f"mode must be 'time' or 'space', got '{mode}'")

    moments = per_path.mean(axis=0)
    usable = moments > 0
    if usable.sum() < MIN_LAGS:
        raise EstimationError(f"only {int(usable.sum())} usable lags, need at least {MIN_LAGS}")
    fit = stats.linregress(np.log(lag_values[usable]), np.log(moments[usable]))
    degenerate = len(fields) < 2 or bool(np.all(per_path[:, usable] == per_path[0, usable]))
    if degenerate:
        logger.warning("[LAB-3 (LocalTime)] ⚠️ degenerate regression: no Monte Carlo spread across the ensemble")
    return {
        "mode": mode,
        "moment": moment,
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r_squared": float(fit.rvalue**2),
        "slope_per_moment": float(fit.slope / moment),
        "lags": [float(v) for v in lag_values],
        "moments": [float(v) for v in moments],
        "degenerate": degenerate,
        "probe": probe,
        "n_fields": len(fields),
    }


def _typical_step(fields: list[LocalTimeField]) -> float:
    """Median per-step spread of the occupation, i.e. the typical |Δw|."""
    spans = [np.median(np.diff(f.increments.indptr)) * f.space_grid.dx for f in fields]
    return float(np.median(spans))


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
class Lab3LocalTime:
    task_description = "Occupation densities & local-time regularity"

    def __init__(self):
        self.role = "LAB-3 (LocalTime)"

    @report_activity
    def fields_for_ensemble(self, ensemble: Ensemble, m_cells: int | None = None, which: str = "fbm") -> list[LocalTimeField]:
        """Local times of every path on one common space grid."""
        rows = ensemble.fbm if which == "fbm" else ensemble.bm
        space = SpaceGrid.covering(rows, m_cells or ensemble.grid.n_steps)
        fields = [occupation_density(p, space) for p in ensemble.paths(which)]
        worst = max(mass_defect(f) for f in fields)
        logger.info(f"[{self.role}] {len(fields)} fields on {space.m_cells} cells, worst mass defect {worst:.2e}")
        return fields

    def refinement_ratio(self, path: SamplePath, f: Callable, m_coarse: int) -> dict:
        """Residual at m_coarse cells over the residual at 2·m_coarse cells."""
        coarse = SpaceGrid.covering(path.values, m_coarse, pad_cells=0)
        fine = SpaceGrid(coarse.x_min, coarse.x_max, 2 * m_coarse)
        r_coarse = occupation_formula_residual(path, occupation_density(path, coarse), f)
        r_fine = occupation_formula_residual(path, occupation_density(path, fine), f)
        ratio = r_coarse / r_fine if r_fine > 0 else math.inf
        return {"coarse": r_coarse, "fine": r_fine, "ratio": ratio}
