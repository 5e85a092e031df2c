from .core import (
    AveragingFunctional,
    ControlEstimate,
    Lab5Young,
    functional_pvar,
    holder_norm,
    holder_seminorm,
    nly_integral,
    nly_residual,
    nly_solve_euler,
    pvar_seminorm,
    sewing_residual,
    stability_gap,
)

__all__ = [
    "AveragingFunctional",
    "ControlEstimate",
    "Lab5Young",
    "functional_pvar",
    "holder_norm",
    "holder_seminorm",
    "nly_integral",
    "nly_residual",
    "nly_solve_euler",
    "pvar_seminorm",
    "sewing_residual",
    "stability_gap",
]
