"""
Lab_2_Besov: windowed Besov numerics.
Drift specifications, the Gaussian heat semigroup, mollifier families,
Littlewood–Paley blocks on a periodic FFT window and the discrete Besov norm.
"""
from __future__ import annotations

import math
import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import special

from ..shared.errors import DomainError, WindowError
from ..shared.utils import report_activity

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-2")

# smooth bump transition: φ = 1 on |ξ| <= 3/4, φ = 0 on |ξ| >= 4/3
PARTITION_INNER = 0.75
PARTITION_OUTER = 4.0 / 3.0
TRUNCATION_EDGE_RATIO = 1e-6
MOLLIFIER_FAMILIES = ("gaussian", "gaussian_odd", "bump")
MAX_WINDOW_POINTS = 2**18


# ═══════════════════════════════════════════════════════════════════════════════
# DOMAIN TYPES
# ═══════════════════════════════════════════════════════════════════════════════
@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float
    q: float = math.inf

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise DomainError(f"Besov integrability needs p, q >= 1 (or inf), got p={self.p}, q={self.q}")

    def as_dict(self) -> dict:
        return {"s": self.s, "p": self.p, "q": self.q}


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples at x_min + jΔx, j < m, periodic on [x_min, x_max)."""
    x_min: float
    x_max: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        m = values.size
        if values.ndim != 1 or m < 2 or m & (m - 1):
            raise DomainError(f"GridField needs a power-of-two number of points, got {values.shape}")
        if not self.x_max > self.x_min:
            raise DomainError("GridField needs x_max > x_min")
        if not np.all(np.isfinite(values)):
            raise DomainError("GridField values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def m_points(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.m_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.m_points)

    @property
    def xi(self) -> np.ndarray:
        """Angular frequencies of the rfft layout."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.m_points, d=self.dx)

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(self.x_min, self.x_max, values)

    def mass(self) -> float:
        return float(self.values.sum() * self.dx)

    def window(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "m_points": self.m_points, "dx": self.dx}

    def evaluate(self, x, extension: str = "zero") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        L = self.x_max - self.x_min
        xs = np.append(self.x, self.x_max)
        vals = np.append(self.values, self.values[0])
        if extension == "periodic":
            return np.interp(self.x_min + np.mod(x - self.x_min, L), xs, vals)
        peak = float(np.max(np.abs(self.values))) or 1.0
        outside = (x < self.x_min) | (x > self.x_max)
        if np.any(outside) and max(abs(self.values[0]), abs(self.values[-1])) > TRUNCATION_EDGE_RATIO * peak:
            raise WindowError(f"evaluation outside the gridded window [{self.x_min}, {self.x_max}]")
        return np.where(outside, 0.0, np.interp(x, xs, vals))

    def __sub__(self, other: "GridField") -> "GridField":
        return self.with_values(self.values - other.values)


SMOOTH_META = BesovParams(math.inf, 1.0)
DIRAC_META = BesovParams(0.0, 1.0)


@dataclass(frozen=True)
class DriftSpec:
    """Symbolic drift b with its declared Besov regularity."""
    variant: str
    params: dict = field(default_factory=dict)
    besov_meta: BesovParams = DIRAC_META
    fn: Callable | None = field(default=None, compare=False)
    grid_field: GridField | None = field(default=None, compare=False)

    # --- constructors ---
    @classmethod
    def dirac(cls, mass: float) -> "DriftSpec":
        return cls("dirac", {"mass": float(mass)}, DIRAC_META)

    @classmethod
    def gaussian(cls, mass: float, width: float) -> "DriftSpec":
        if not width > 0:
            raise DomainError(f"gaussian width (variance) must be positive, got {width}")
        return cls("gaussian", {"mass": float(mass), "width": float(width)}, SMOOTH_META)

    @classmethod
    def power_cusp(cls, exponent: float, radius: float, amplitude: float = 1.0) -> "DriftSpec":
        if not -1.0 < exponent < 0.0:
            raise DomainError(f"cusp exponent must lie in (-1, 0), got {exponent}")
        if not radius > 0:
            raise DomainError("cusp cutoff radius must be positive")
        return cls("power_cusp", {"exponent": float(exponent), "radius": float(radius), "amplitude": float(amplitude)},
                   BesovParams(exponent + 1.0, 1.0))

    @classmethod
    def smooth(cls, fn: Callable, name: str = "custom", bounded: bool = True, nonnegative: bool = False,
               window: float = 8.0, meta: BesovParams = SMOOTH_META, **params) -> "DriftSpec":
        return cls("smooth", {"name": name, "bounded": bounded, "nonnegative": nonnegative,
                              "window": float(window), **params}, meta, fn=fn)

    @classmethod
    def gridded(cls, grid_field: GridField, meta: BesovParams = SMOOTH_META, extension: str = "zero") -> "DriftSpec":
        if extension not in ("zero", "periodic"):
            raise DomainError(f"unknown extension '{extension}'")
        return cls("gridded", {"extension": extension, **grid_field.window()}, meta, grid_field=grid_field)

    # --- properties ---
    @property
    def is_nonnegative(self) -> bool:
        if self.variant == "dirac":
            return self.params["mass"] >= 0
        if self.variant == "gaussian":
            return self.params["mass"] >= 0
        if self.variant == "power_cusp":
            return self.params["amplitude"] >= 0
        if self.variant == "smooth":
            return bool(self.params.get("nonnegative"))
        return bool(np.all(self.grid_field.values >= 0))

    @property
    def is_measure(self) -> bool:
        return self.variant in ("dirac", "gaussian", "power_cusp")

    @property
    def is_bounded(self) -> bool:
        if self.variant in ("dirac", "power_cusp"):
            return False
        if self.variant == "smooth":
            return bool(self.params.get("bounded"))
        return True

    def support_halfwidth(self) -> float | None:
        """Half-width of the effective support around 0; None for non-decaying drifts."""
        if self.variant == "dirac":
            return 0.0
        if self.variant == "gaussian":
            return 10.0 * math.sqrt(self.params["width"])
        if self.variant == "power_cusp":
            return self.params["radius"]
        if self.variant == "gridded" and self.params["extension"] == "zero":
            return max(abs(self.params["x_min"]), abs(self.params["x_max"]))
        return None

    def total_mass(self) -> float:
        if self.variant in ("dirac", "gaussian"):
            return self.params["mass"]
        if self.variant == "power_cusp":
            th, R, amp = self.params["exponent"], self.params["radius"], self.params["amplitude"]
            return 2.0 * amp * R ** (th + 1.0) / (th + 1.0)
        if self.variant == "gridded":
            return self.grid_field.mass()
        raise DomainError("total mass is undefined for a smooth closure")

    def evaluate(self, x) -> np.ndarray:
        """Pointwise representative; Dirac masses have none."""
        x = np.asarray(x, dtype=float)
        if self.variant == "gaussian":
            m, w = self.params["mass"], self.params["width"]
            return m * np.exp(-0.5 * x * x / w) / math.sqrt(2.0 * math.pi * w)
        if self.variant == "smooth":
            return np.broadcast_to(np.asarray(self.fn(x), dtype=float), x.shape).copy()
        if self.variant == "gridded":
            return self.grid_field.evaluate(x, self.params["extension"])
        if self.variant == "power_cusp":
            th, R, amp = self.params["exponent"], self.params["radius"], self.params["amplitude"]
            with np.errstate(divide="ignore"):
                return np.where(np.abs(x) <= R, amp * np.abs(x) ** th, 0.0)
        raise DomainError("a Dirac mass has no pointwise representative; use the local-time route")

    def cell_integrals(self, edges: np.ndarray) -> np.ndarray:
        """∫ b over consecutive cells [edges[j], edges[j+1]]; exact for closed-form variants."""
        edges = np.asarray(edges, dtype=float)
        if self.variant == "dirac":
            out = np.zeros(edges.size - 1)
            j = np.searchsorted(edges, 0.0, side="right") - 1
            if 0 <= j < out.size:
                out[j] = self.params["mass"]
            return out
        if self.variant == "gaussian":
            m, w = self.params["mass"], self.params["width"]
            return m * np.diff(special.ndtr(edges / math.sqrt(w)))
        if self.variant == "power_cusp":
            return np.diff(self.cusp_antiderivative(edges))
        # midpoint rule for closures and gridded fields
        mids = 0.5 * (edges[:-1] + edges[1:])
        return self.evaluate(mids) * np.diff(edges)

    def cusp_antiderivative(self, u) -> np.ndarray:
        th, R, amp = self.params["exponent"], self.params["radius"], self.params["amplitude"]
        u = np.asarray(u, dtype=float)
        return amp * np.sign(u) * np.minimum(np.abs(u), R) ** (th + 1.0) / (th + 1.0)

    def summary(self) -> dict:
        return {"variant": self.variant, **{k: v for k, v in self.params.items()},
                "besov_meta": self.besov_meta.as_dict()}


def smooth_preset(name: str, **params) -> DriftSpec:
    """Named closures used by experiment configs."""
    if name == "constant":
        c = float(params.get("value", 1.0))
        return DriftSpec.smooth(lambda x: np.full_like(np.asarray(x, dtype=float), c), name="constant",
                                bounded=True, nonnegative=c >= 0, value=c)
    if name == "sine":
        amp, freq = float(params.get("amplitude", 1.0)), float(params.get("frequency", 1.0))
        return DriftSpec.smooth(lambda x: amp * np.sin(freq * np.asarray(x)), name="sine",
                                amplitude=amp, frequency=freq)
    if name == "tanh":
        amp, scale = float(params.get("amplitude", 1.0)), float(params.get("scale", 1.0))
        return DriftSpec.smooth(lambda x: amp * np.tanh(np.asarray(x) / scale), name="tanh",
                                amplitude=amp, scale=scale)
    if name == "linear":
        slope = float(params.get("slope", 1.0))
        return DriftSpec.smooth(lambda x: slope * np.asarray(x), name="linear", bounded=False, slope=slope)
    raise DomainError(f"unknown smooth preset '{name}'")


# ═══════════════════════════════════════════════════════════════════════════════
# DISCRETISATION & SEMIGROUP
# ═══════════════════════════════════════════════════════════════════════════════
def _power_of_two_at_least(n: float) -> int:
    return int(2 ** math.ceil(math.log2(max(n, 2.0))))


def default_window(b: DriftSpec, t: float = 0.0) -> tuple[float, int]:
    """(half-width, points) resolving b and g_t."""
    spread = math.sqrt(t) if t > 0 else 0.0
    if b.variant == "power_cusp":
        R = b.params["radius"]
        half = R + 10.0 * spread + 0.25 * R
        scale = min(R, spread) if spread > 0 else R
    elif b.variant == "gaussian":
        w = b.params["width"] + t
        half, scale = 10.0 * math.sqrt(w), math.sqrt(w)
    elif b.variant == "smooth":
        half, scale = b.params["window"], min(b.params["window"], spread) if spread > 0 else b.params["window"]
    else:
        raise DomainError(f"no default window for variant '{b.variant}'")
    m = min(_power_of_two_at_least(2.0 * half / (scale / 32.0)), MAX_WINDOW_POINTS)
    return half, m


def to_grid_field(b: DriftSpec, half_width: float | None = None, m_points: int | None = None) -> GridField:
    """Cell averages for closed-form variants (mass exact), samples for closures."""
    if b.variant == "gridded":
        return b.grid_field
    if b.variant == "dirac":
        raise DomainError("a Dirac mass cannot be tabulated; smooth it with gaussian_semigroup first")
    if half_width is None or m_points is None:
        dh, dm = default_window(b)
        half_width, m_points = half_width or dh, m_points or dm
    dx = 2.0 * half_width / m_points
    x = -half_width + dx * np.arange(m_points)
    if b.variant == "smooth":
        return GridField(-half_width, half_width, b.evaluate(x))
    edges = np.append(x - 0.5 * dx, x[-1] + 0.5 * dx)
    return GridField(-half_width, half_width, b.cell_integrals(edges) / dx)


def heat_multiplier(f: GridField, t: float) -> np.ndarray:
    return np.exp(-0.5 * t * f.xi**2)


def _convolve_spectral(f: GridField, multiplier: np.ndarray) -> GridField:
    return f.with_values(np.fft.irfft(np.fft.rfft(f.values) * multiplier, n=f.m_points))


def gaussian_semigroup(f, t: float):
    """G_t f = g_t * f, g_t the centred Gaussian density of variance t."""
    if not t > 0:
        raise DomainError(f"gaussian_semigroup needs t > 0, got {t}")
    if isinstance(f, GridField):
        return _convolve_spectral(f, heat_multiplier(f, t))
    if f.variant == "dirac":
        return DriftSpec.gaussian(f.params["mass"], t)
    if f.variant == "gaussian":
        return DriftSpec.gaussian(f.params["mass"], f.params["width"] + t)
    if f.variant == "gridded":
        grid_field, extension, meta = f.grid_field, f.params["extension"], f.besov_meta
    else:
        half, m = default_window(f, t)
        grid_field = to_grid_field(f, half, m)
        # closures are sampled on a window and treated as periodic there
        extension = "periodic" if f.variant == "smooth" else "zero"
        meta = SMOOTH_META
    smoothed = _convolve_spectral(grid_field, heat_multiplier(grid_field, t))
    return DriftSpec.gridded(smoothed, meta, extension)


def bump_density(x, radius: float) -> np.ndarray:
    """Normalised C^∞ bump supported on [−radius, radius]."""
    x = np.asarray(x, dtype=float) / radius
    inside = np.abs(x) < 1.0
    out = np.zeros_like(x)
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out / (radius * _BUMP_NORM)


# ∫_{-1}^{1} exp(−1/(1−u²)) du
_BUMP_NORM = 0.44399381616807943


def bump_radius(n: int) -> float:
    return 2.0 / math.sqrt(n)


def _bump_convolve(b: DriftSpec, radius: float) -> DriftSpec:
    if b.variant == "dirac":
        a = b.params["mass"]
        return DriftSpec.smooth(lambda x: a * bump_density(x, radius), name="bump", bounded=True,
                                nonnegative=a >= 0, window=radius, mass=a, radius=radius)
    if b.variant == "gridded":
        grid_field, extension = b.grid_field, b.params["extension"]
    else:
        half, m = default_window(b, radius**2)
        grid_field = to_grid_field(b, half + radius, m)
        extension = "periodic" if b.variant == "smooth" else "zero"
    kernel = bump_density(np.fft.fftfreq(grid_field.m_points, 1.0 / grid_field.m_points) * grid_field.dx, radius)
    kernel = kernel / (kernel.sum() * grid_field.dx)
    multiplier = np.fft.rfft(kernel).real * grid_field.dx
    return DriftSpec.gridded(_convolve_spectral(grid_field, multiplier), SMOOTH_META, extension)


def mollify(b: DriftSpec, n: int, family: str = "gaussian") -> DriftSpec:
    """b^n: G_{1/n} b by default; G_{1/(2n+1)} or the radius-2/√n bump for the other families."""
    if int(n) != n or n < 1:
        raise DomainError(f"mollify needs an integer n >= 1, got {n}")
    if family == "gaussian":
        return gaussian_semigroup(b, 1.0 / n)
    if family == "gaussian_odd":
        return gaussian_semigroup(b, 1.0 / (2 * n + 1))
    if family == "bump":
        return _bump_convolve(b, bump_radius(n))
    raise DomainError(f"unknown mollifier family '{family}', expected one of {MOLLIFIER_FAMILIES}")


# ═══════════════════════════════════════════════════════════════════════════════
# LITTLEWOOD–PALEY
# ═══════════════════════════════════════════════════════════════════════════════
def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C^∞ step: 0 for u <= 0, 1 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def partition_chi(xi) -> np.ndarray:
    u = (np.abs(np.asarray(xi, dtype=float)) - PARTITION_INNER) / (PARTITION_OUTER - PARTITION_INNER)
    return 1.0 - _smooth_step(u)


def partition_rho(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return partition_chi(xi / 2.0) - partition_chi(xi)


PARTITION_SPEC = {
    "chi": "1 - S((|xi| - 3/4) / (4/3 - 3/4)), S(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)})",
    "rho": "chi(xi/2) - chi(xi)",
    "supp_chi": [-4.0 / 3.0, 4.0 / 3.0],
    "supp_rho": [0.75, 8.0 / 3.0],
}


@dataclass
class BlockDecomposition:
    blocks: list[GridField]
    indices: list[int]
    truncation_warning: bool
    partition: dict = field(default_factory=lambda: dict(PARTITION_SPEC))

    def reconstruct(self) -> np.ndarray:
        return np.sum([b.values for b in self.blocks], axis=0)


def top_block_index(f: GridField) -> int:
    """Smallest J with χ(2^{−J−1}ξ) ≡ 1 up to Nyquist, so the blocks telescope exactly."""
    xi_max = float(f.xi[-1])
    return max(0, math.ceil(math.log2(max(xi_max / PARTITION_INNER, 1.0))) - 1)


def littlewood_paley_blocks(f: GridField) -> BlockDecomposition:
    """Δ_{−1} f, Δ_0 f, …, Δ_J f on the periodic window; Σ_j Δ_j f = f."""
    spectrum = np.fft.rfft(f.values)
    xi = f.xi
    J = top_block_index(f)
    weights = [partition_chi(xi)] + [partition_rho(xi / 2.0**j) for j in range(J + 1)]
    blocks = [f.with_values(np.fft.irfft(spectrum * w, n=f.m_points)) for w in weights]
    peak = float(np.max(np.abs(f.values)))
    edge = max(abs(f.values[0]), abs(f.values[-1]))
    warn = peak > 0 and edge > TRUNCATION_EDGE_RATIO * peak
    if warn:
        logger.warning(f"[LAB-2 (Besov)] ⚠️ window [{f.x_min}, {f.x_max}] truncates the field (edge/peak = {edge / peak:.2e})")
    return BlockDecomposition(blocks, list(range(-1, J + 1)), bool(warn))


def lp_norm(values: np.ndarray, dx: float, p: float) -> float:
    values = np.abs(np.asarray(values, dtype=float))
    if math.isinf(p):
        return float(values.max()) if values.size else 0.0
    return float((np.sum(values**p) * dx) ** (1.0 / p))


def besov_norm(f: GridField, params: BesovParams, decomposition: BlockDecomposition | None = None) -> float:
    """(Σ_j (2^{js}‖Δ_j f‖_{L^p})^q)^{1/q} on the window; q = ∞ is a max."""
    dec = decomposition or littlewood_paley_blocks(f)
    terms = np.array([2.0 ** (j * params.s) * lp_norm(b.values, f.dx, params.p)
                      for j, b in zip(dec.indices, dec.blocks)])
    if math.isinf(params.q):
        return float(terms.max())
    return float(np.sum(terms**params.q) ** (1.0 / params.q))


def besov_report(f: GridField, params: BesovParams) -> dict:
    dec = littlewood_paley_blocks(f)
    return {
        "norm": besov_norm(f, params, dec),
        "params": params.as_dict(),
        "window": f.window(),
        "partition": dec.partition,
        "n_blocks": len(dec.blocks),
        "truncation_warning": dec.truncation_warning,
    }


def heat_smoothing_slope(b: DriftSpec, p: float, ts, half_width: float = 8.0, m_points: int = 2**14) -> dict:
    """Slope of log‖G_t b‖_{L^p} against log t on a fixed window."""
    ts = np.asarray(ts, dtype=float)
    dx = 2.0 * half_width / m_points
    x = -half_width + dx * np.arange(m_points)
    norms = []
    for t in ts:
        smoothed = gaussian_semigroup(b, float(t))
        vals = smoothed.evaluate(x) if smoothed.variant != "gridded" else smoothed.grid_field.evaluate(x, "zero")
        norms.append(lp_norm(vals, dx, p))
    slope, intercept = np.polyfit(np.log(ts), np.log(norms), 1)
    return {"slope": float(slope), "intercept": float(intercept), "norms": [float(v) for v in norms], "p": p}


def semigroup_contraction(f: GridField, params: BesovParams, ts) -> dict:
    """sup_t ‖G_t f‖ / ‖f‖ in B^s_{p,q}; the heat semigroup never increases the norm."""
    base = besov_norm(f, params)
    ratios = [besov_norm(gaussian_semigroup(f, float(t)), params) / base if base > 0 else 0.0 for t in ts]
    return {"base_norm": base, "max_ratio": float(max(ratios)), "contractive": bool(max(ratios) <= 1.0 + 1e-12)}


# ═══════════════════════════════════════════════════════════════════════════════
# STATION
# ═══════════════════════════════════════════════════════════════════════════════
class Lab2Besov:
    task_description = "Besov estimator sweeps & mollification convergence"

    def __init__(self):
        self.role = "LAB-2 (Besov)"

    @report_activity
    def heat_kernel_sweep(self, ts, params: BesovParams, half_width: float = 8.0, m_points: int = 2**13) -> dict:
        """Besov norm of the sampled g_t across t."""
        dx = 2.0 * half_width / m_points
        x = -half_width + dx * np.arange(m_points)
        rows = []
        for t in ts:
            g = GridField(-half_width, half_width, DriftSpec.gaussian(1.0, float(t)).evaluate(x))
            rows.append({"t": float(t), "norm": besov_norm(g, params)})
        norms = np.array([r["norm"] for r in rows])
        slope = float(np.polyfit(np.log([r["t"] for r in rows]), np.log(norms), 1)[0])
        logger.info(f"[{self.role}] g_t sweep in B^{params.s}: log-log slope {slope:.3f}")
        return {"rows": rows, "slope": slope, "params": params.as_dict(), "max_over_min": float(norms.max() / norms.min())}

    @report_activity
    def mollification_distances(self, b: DriftSpec, n_list, params: BesovParams,
                                half_width: float | None = None, m_points: int | None = None) -> dict:
        """‖G_{1/n} b − b‖ in B^{β'}_p on one shared window."""
        base = to_grid_field(b, half_width, m_points)
        rows = [{"n": int(n), "distance": besov_norm(gaussian_semigroup(base, 1.0 / n) - base, params)} for n in n_list]
        distances = [r["distance"] for r in rows]
        decreasing = all(b2 <= b1 for b1, b2 in zip(distances, distances[1:]))
        if not decreasing:
            logger.warning(f"[{self.role}] ⚠️ mollification distances are not monotone: {distances}")
        return {"rows": rows, "decreasing": decreasing, "window": base.window(), "params": params.as_dict()}
