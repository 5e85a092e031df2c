from .core import (
    Lab3LocalTime,
    LocalTimeField,
    SpaceGrid,
    holder_exponent_scan,
    mass_defect,
    occupation_density,
    occupation_formula_residual,
    occupation_median,
)

__all__ = [
    "Lab3LocalTime",
    "LocalTimeField",
    "SpaceGrid",
    "holder_exponent_scan",
    "mass_defect",
    "occupation_density",
    "occupation_formula_residual",
    "occupation_median",
]
