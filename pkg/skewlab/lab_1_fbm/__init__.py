from .core import (
    Ensemble,
    Grid,
    HurstParam,
    Lab1Sampler,
    PathPair,
    RngSeed,
    SamplePath,
    conditional_mean,
    conditional_variance,
    fbm_covariance,
    fit_local_nondeterminism,
    fit_two_time_lower_bound,
    hurst_value,
    kernel_constant,
    kernel_KH,
    kernel_KH_vec,
    kernel_square_integral,
    sample_fbm_cholesky,
    sample_fbm_circulant,
    sample_fbm_volterra,
    two_time_variant,
    volterra_matrix,
    volterra_transform,
)

__all__ = [
    "Ensemble",
    "Grid",
    "HurstParam",
    "Lab1Sampler",
    "PathPair",
    "RngSeed",
    "SamplePath",
    "conditional_mean",
    "conditional_variance",
    "fbm_covariance",
    "fit_local_nondeterminism",
    "fit_two_time_lower_bound",
    "hurst_value",
    "kernel_constant",
    "kernel_KH",
    "kernel_KH_vec",
    "kernel_square_integral",
    "sample_fbm_cholesky",
    "sample_fbm_circulant",
    "sample_fbm_volterra",
    "two_time_variant",
    "volterra_matrix",
    "volterra_transform",
]
