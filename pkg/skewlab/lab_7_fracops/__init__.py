from .core import (
    Lab7Operators,
    OperatorConfig,
    bm_to_fbm,
    bm_to_fbm_rows,
    boundedness_ratio,
    composite_decomposition,
    composite_normalisation,
    fbm_to_bm,
    fbm_to_bm_rows,
    function_corpus,
    gaussianity_diagnostic,
    pi_tilde,
    pi_tilde_rows,
    riemann_liouville,
    riemann_liouville_rows,
)

__all__ = [
    "Lab7Operators",
    "OperatorConfig",
    "bm_to_fbm",
    "bm_to_fbm_rows",
    "boundedness_ratio",
    "composite_decomposition",
    "composite_normalisation",
    "fbm_to_bm",
    "fbm_to_bm_rows",
    "function_corpus",
    "gaussianity_diagnostic",
    "pi_tilde",
    "pi_tilde_rows",
    "riemann_liouville",
    "riemann_liouville_rows",
]
