from .core import (
    AveragedField,
    Lab4Averaging,
    averaging_direct,
    averaging_via_localtime,
    cell_kernel,
    field_regularity,
    mollified_operator_limit,
)

__all__ = [
    "AveragedField",
    "Lab4Averaging",
    "averaging_direct",
    "averaging_via_localtime",
    "cell_kernel",
    "field_regularity",
    "mollified_operator_limit",
]
