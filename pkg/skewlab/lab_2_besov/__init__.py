from .core import (
    BesovParams,
    BlockDecomposition,
    DriftSpec,
    GridField,
    Lab2Besov,
    MOLLIFIER_FAMILIES,
    PARTITION_SPEC,
    besov_norm,
    besov_report,
    bump_density,
    gaussian_semigroup,
    heat_smoothing_slope,
    littlewood_paley_blocks,
    lp_norm,
    mollify,
    semigroup_contraction,
    smooth_preset,
    to_grid_field,
)

__all__ = [
    "BesovParams",
    "BlockDecomposition",
    "DriftSpec",
    "GridField",
    "Lab2Besov",
    "MOLLIFIER_FAMILIES",
    "PARTITION_SPEC",
    "besov_norm",
    "besov_report",
    "bump_density",
    "gaussian_semigroup",
    "heat_smoothing_slope",
    "littlewood_paley_blocks",
    "lp_norm",
    "mollify",
    "semigroup_contraction",
    "smooth_preset",
    "to_grid_field",
]
