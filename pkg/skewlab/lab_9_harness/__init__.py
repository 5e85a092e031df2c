from .core import (
    EXPERIMENT_REGISTRY,
    ExperimentResult,
    Lab9Harness,
    list_experiments,
    load_config,
    run,
    validate,
)
from .models import (
    BATTERY_DEFAULTS,
    EXPERIMENTS,
    DriftConfig,
    ExperimentConfig,
    GridConfig,
    ScheduleConfig,
    YoungConfig,
    config_warnings,
    cross_field_issues,
)

__all__ = [
    "BATTERY_DEFAULTS",
    "EXPERIMENTS",
    "EXPERIMENT_REGISTRY",
    "DriftConfig",
    "ExperimentConfig",
    "ExperimentResult",
    "GridConfig",
    "Lab9Harness",
    "ScheduleConfig",
    "YoungConfig",
    "config_warnings",
    "cross_field_issues",
    "list_experiments",
    "load_config",
    "run",
    "validate",
]
