"""
Exception hierarchy for recurrence analysis.

Every error carries the process exit code the CLI reports for it:
1 for configuration parse errors, 2 for validation and hypothesis errors,
3 for internal inconsistencies.
"""

from __future__ import annotations


class DcqError(ValueError):
    """Base class for all domain errors."""

    exit_code = 2


# =============================================================================
# SPECIFICATION
# =============================================================================


class EmptyBranches(DcqError):
    def __init__(self) -> None:
        super().__init__("Recurrence needs at least one branch (b, p).")


class RatioOutOfRange(DcqError):
    def __init__(self, index: int, ratio: object) -> None:
        self.index = index
        self.ratio = ratio
        super().__init__(f"Branch {index}: ratio p={ratio} is not in (0, 1).")


class NegativeWeight(DcqError):
    def __init__(self, index: int, weight: object) -> None:
        self.index = index
        super().__init__(f"Branch {index}: weight b={weight} is negative.")


class InexactRatio(DcqError):
    def __init__(self, index: int, ratio: object) -> None:
        self.index = index
        super().__init__(
            f"Branch {index}: ratio {ratio!r} must be an exact rational "
            "(a 'u/v' or decimal string, an int or a Fraction), not a float."
        )


class SubcriticalWeightSum(DcqError):
    def __init__(self, weight_sum: object) -> None:
        self.weight_sum = weight_sum
        super().__init__(
            f"Sum of weights is {weight_sum} <= 1: no positive critical exponent exists."
        )


class IndexOverflow(DcqError):
    def __init__(self, numerator: int, horizon: int) -> None:
        super().__init__(
            f"Floor index u*n = {numerator}*{horizon} exceeds the 64-bit integer range."
        )


# =============================================================================
# NUMERICS
# =============================================================================


class ToleranceUnreachable(DcqError):
    pass


class InternalInconsistency(DcqError):
    """A cross-check between two independent computations failed."""

    exit_code = 3


class EnvelopeTooWeak(DcqError):
    def __init__(self, eta: float, s0: float) -> None:
        self.eta = eta
        self.s0 = s0
        super().__init__(
            f"Envelope exponent eta={eta} must be < s0={s0}; summability of "
            "|a_n|/n^(s0+1) cannot be certified."
        )


# =============================================================================
# STOCHASTIC
# =============================================================================


class DomainError(DcqError):
    pass


class EmptySample(DcqError):
    def __init__(self) -> None:
        super().__init__("Sample is empty.")


class OutOfValidityRegion(DcqError):
    pass


class DriverParameterError(DcqError):
    pass


# =============================================================================
# CONFIGURATION
# =============================================================================


class TollTooShort(DcqError):
    def __init__(self, length: int, horizon: int) -> None:
        super().__init__(
            f"Toll has {length} values but horizon {horizon} needs {horizon + 1}."
        )


class ConfigParseError(DcqError):
    exit_code = 1
