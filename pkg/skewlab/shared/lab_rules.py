"""
SKEWLAB REGIME RULES ENGINE
===========================
Centralised thresholds and cross-field rules. The harness validator, the skew
solver and the regularity scan all read their limits from here.

RULES:
  1. Well-posedness regimes for dX = b(X)dt + dB^H with b in B^beta_p
  2. Nonlinear Young admissibility (theta := 1/p + eta/q > 1, stability delta window)
  3. Path-by-path scope (measure drifts or bounded smooth drifts)
  4. Sampler grid constraints
"""
from __future__ import annotations

import math
import logging
from typing import Any

logger = logging.getLogger("LAB-RULES")


# ═══════════════════════════════════════════════════════════════════════════
# THRESHOLDS (RULE 1)
# ═══════════════════════════════════════════════════════════════════════════
SKEW_EXISTENCE_H = math.sqrt(2.0) - 1.0
PATHWISE_UNIQUENESS_H = 0.25
FINITE_MEASURE_WEAK_H = 1.0 / 3.0

MEASURE_VARIANTS = ("dirac", "gaussian", "power_cusp")
BOUNDED_SMOOTH_PRESETS = ("constant", "sine", "tanh")
UNBOUNDED_SMOOTH_PRESETS = ("linear",)

CHOLESKY_MAX_STEPS = 4096
MEASURE_HYPOTHESIS = (
    "path-by-path solutions are constructed for drifts b in B^beta_p that are "
    "measures (existence theorem for the nonlinear Young formulation); "
    "a bounded smooth drift is also accepted"
)
YOUNG_CONDITION = "θ:=1/p+η/q>1"


def drift_part_exponent(H: float, beta: float, p: float) -> float:
    """Hölder-in-L^m exponent of K = X - B: 1 + min(H(beta - 1/p), 0)."""
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return 1.0 + min(H * (beta - inv_p), 0.0)


def classify_regime(H: float, beta: float, p: float) -> dict[str, Any]:
    """Which existence / uniqueness statements cover (H, beta, p)."""
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    critical = 1.0 - 1.0 / (2.0 * H)

    if H >= FINITE_MEASURE_WEAK_H:
        measure_existence_a = beta > 1.0 + H / 2.0 - 1.0 / (2.0 * H)
    else:
        measure_existence_a = beta > 2.0 * H - 1.0
    measure_existence_b = p >= 2.0 and beta > critical
    measure_existence = measure_existence_a or measure_existence_b

    weak_existence = beta - inv_p > 0.5 - 1.0 / (2.0 * H)
    strong_uniqueness = H < 0.5 and beta > critical and beta - inv_p >= critical

    finite_measure = beta == 0.0 and p == 1.0
    regime = {
        "H": H,
        "beta": beta,
        "p": p,
        "measure_existence": bool(measure_existence),
        "weak_existence": bool(weak_existence),
        "strong_uniqueness": bool(strong_uniqueness),
        "skew_existence": bool(finite_measure and H < SKEW_EXISTENCE_H),
        "pathwise_uniqueness_finite_measure": bool(finite_measure and H <= PATHWISE_UNIQUENESS_H),
        "uniqueness_boundary": bool(finite_measure and H == PATHWISE_UNIQUENESS_H),
        "drift_part_exponent": drift_part_exponent(H, beta, p),
    }
    if strong_uniqueness:
        regime["label"] = "strong_unique"
    elif weak_existence or measure_existence:
        regime["label"] = "weak_exists"
    else:
        regime["label"] = "open"
    return regime


# ═══════════════════════════════════════════════════════════════════════════
# YOUNG ADMISSIBILITY (RULE 2)
# ═══════════════════════════════════════════════════════════════════════════
def young_theta(p: float, q: float, eta: float) -> float:
    return 1.0 / p + eta / q


def stability_delta_window(p: float, q: float, eta: float) -> tuple[float, float]:
    """Open interval (q(1 - 1/p), eta) for the stability exponent delta; may be empty."""
    return q * (1.0 - 1.0 / p), eta


def check_young(p: float, q: float, eta: float) -> list[dict[str, str]]:
    issues = []
    if young_theta(p, q, eta) <= 1.0:
        issues.append({
            "loc": "young",
            "msg": f"theta = 1/p + eta/q = {young_theta(p, q, eta):.4f} violates {YOUNG_CONDITION}",
        })
    return issues


# ═══════════════════════════════════════════════════════════════════════════
# PATH-BY-PATH SCOPE (RULE 3)
# ═══════════════════════════════════════════════════════════════════════════
def is_pathbypath_admissible(variant: str, preset: str | None = None) -> bool:
    if variant in MEASURE_VARIANTS:
        return True
    if variant == "smooth":
        return preset in BOUNDED_SMOOTH_PRESETS
    return False


def check_pathbypath_drift(variant: str, preset: str | None = None) -> list[dict[str, str]]:
    if is_pathbypath_admissible(variant, preset):
        return []
    what = f"smooth preset '{preset}' (unbounded)" if variant == "smooth" else f"variant '{variant}'"
    return [{"loc": "drift", "msg": f"pathbypath rejects {what}: {MEASURE_HYPOTHESIS}"}]


# ═══════════════════════════════════════════════════════════════════════════
# SAMPLER GRIDS (RULE 4)
# ═══════════════════════════════════════════════════════════════════════════
def check_sampler_grid(sampler: str, n_steps: int) -> list[dict[str, str]]:
    if sampler == "circulant" and n_steps & (n_steps - 1):
        return [{"loc": "grid.n_steps", "msg": f"circulant sampler needs a power of two, got {n_steps}"}]
    if sampler == "cholesky" and n_steps > CHOLESKY_MAX_STEPS:
        return [{"loc": "grid.n_steps", "msg": f"cholesky sampler is capped at {CHOLESKY_MAX_STEPS} steps"}]
    return []


def regime_warnings(experiment: str, H: float, beta: float, p: float) -> list[str]:
    warnings = []
    regime = classify_regime(H, beta, p)
    finite_measure = beta == 0.0 and p == 1.0
    if experiment == "skew" and not regime["skew_existence"] and finite_measure:
        warnings.append(f"H={H} is outside the skew-fBm existence range H < {SKEW_EXISTENCE_H:.4f}")
    if experiment == "uniqueness" and finite_measure:
        if H > PATHWISE_UNIQUENESS_H:
            warnings.append(f"H={H} > 1/4: pathwise uniqueness is not covered for finite-measure drifts")
        elif regime["uniqueness_boundary"]:
            warnings.append("H = 1/4 is the boundary case of the uniqueness statement")
    for w in warnings:
        logger.warning(f"[LAB-RULES] ⚠️ {w}")
    return warnings
