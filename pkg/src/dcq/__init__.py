"""
Analysis of divide-and-conquer recurrences X_n = a_n + sum_j b_j X_floor(p_j n).
"""

from .coefficients import (
    CoefficientTable,
    Envelope,
    LimitEstimate,
    coefficient_table,
    empirical_ell,
    ell,
    ell_zero,
    limit_estimate,
    limit_total,
)
from .errors import DcqError
from .exponent import CriticalExponent, RegimeReport, regime_report, solve_exponent
from .recurrence import (
    Branch,
    KernelColumn,
    RecurrenceSpec,
    Trajectory,
    evaluate_dense,
    evaluate_exact,
    evaluate_sparse,
    floor_index,
    geometric_checkpoints,
    kernel_column,
    validate_spec,
)
from .tolls import TollSequence, constant, from_function, from_values, impulse, prefix

__all__ = [
    "Branch",
    "CoefficientTable",
    "CriticalExponent",
    "DcqError",
    "Envelope",
    "KernelColumn",
    "LimitEstimate",
    "RecurrenceSpec",
    "RegimeReport",
    "TollSequence",
    "Trajectory",
    "coefficient_table",
    "constant",
    "ell",
    "ell_zero",
    "empirical_ell",
    "evaluate_dense",
    "evaluate_exact",
    "evaluate_sparse",
    "floor_index",
    "from_function",
    "from_values",
    "geometric_checkpoints",
    "impulse",
    "kernel_column",
    "limit_estimate",
    "limit_total",
    "prefix",
    "regime_report",
    "solve_exponent",
    "validate_spec",
]
