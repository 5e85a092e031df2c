from .core import (
    BundleEnsemble,
    Lab6Solver,
    MollifierSchedule,
    SolutionBundle,
    SolveConfig,
    conditional_drift_expectation,
    mollified_drift_part,
    regularity_scan,
    skew_fbm,
    solve,
    solve_mollified,
    solve_pathbypath,
    uniqueness_diagnostic,
)

__all__ = [
    "BundleEnsemble",
    "Lab6Solver",
    "MollifierSchedule",
    "SolutionBundle",
    "SolveConfig",
    "conditional_drift_expectation",
    "mollified_drift_part",
    "regularity_scan",
    "skew_fbm",
    "solve",
    "solve_mollified",
    "solve_pathbypath",
    "uniqueness_diagnostic",
]
