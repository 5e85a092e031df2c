"""Exception hierarchy shared by every station.

Library code raises; only the harness catches, at the run boundary.
"""
from __future__ import annotations

from typing import Any


class LabError(RuntimeError):
    pass


class DomainError(LabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class FactorizationError(LabError):
    pass


class EmbeddingError(LabError):
    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class WindowError(LabError):
    """A field window is too narrow, or a path left a tabulated window."""


class DivergenceError(LabError):
    pass


class PreconditionError(LabError):
    pass


class EstimationError(LabError):
    pass


class SingularIntegralError(LabError):
    pass


class ConfigError(LabError):
    def __init__(self, message: str, issues: list[dict[str, Any]] | None = None):
        super().__init__(message)
        self.issues = issues or []
