"""
Stochastic domination of a nonnegative sample X by Y + a, Y ~ Exp(alpha).

With a = (1/alpha) ln E exp(alpha X), Markov's inequality gives
P(X >= t) <= exp(-alpha (t - a)), so X is dominated by the shifted
exponential. The empirical check compares the sample survival function with
the exact survival of Y + a inside a DKW confidence band.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..constants import DEFAULT_CONFIDENCE
from ..errors import DomainError, EmptySample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DominationCheck:
    sample_size: int
    grid_size: int
    violation_count: int
    max_excess: float
    dkw_slack: float
    confidence: float

    @property
    def passed(self) -> bool:
        return self.max_excess <= self.dkw_slack

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, object]:
        return {
            "sample_size": self.sample_size,
            "grid_size": self.grid_size,
            "violation_count": self.violation_count,
            "max_excess": self.max_excess,
            "dkw_slack": self.dkw_slack,
            "confidence": self.confidence,
            "verdict": self.verdict,
        }


def exp_shift(alpha: float, mgf_value: float) -> float:
    """Shift a = ln(E exp(alpha X)) / alpha."""
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"Rate alpha must be finite and > 0, got {alpha}.")
    if not (math.isfinite(mgf_value) and mgf_value > 0):
        raise DomainError(f"MGF value must be finite and > 0, got {mgf_value}.")
    if mgf_value < 1:
        logger.warning(
            f"exp_shift: MGF value {mgf_value!r} < 1, so X is not nonnegative; shift is negative."
        )
    return math.log(mgf_value) / alpha


def dkw_slack(n: int, confidence: float = DEFAULT_CONFIDENCE) -> float:
    """Half-width sqrt(ln(2/delta) / (2n)) of the DKW band at confidence 1 - delta."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n))


def shifted_exponential_survival(t: np.ndarray, alpha: float, a: float) -> np.ndarray:
    """P(Y + a >= t) for Y ~ Exp(alpha)."""
    return np.where(t <= a, 1.0, np.exp(-alpha * np.maximum(t - a, 0.0)))


def empirical_survival(sorted_samples: np.ndarray, t: np.ndarray) -> np.ndarray:
    """P_hat(X >= t) from an ascending sample."""
    n = sorted_samples.size
    return (n - np.searchsorted(sorted_samples, t, side="left")) / n


def check_domination(
    samples_x: np.ndarray | list[float],
    alpha: float,
    a: float,
    grid: np.ndarray | list[float] | None = None,
    confidence: float = DEFAULT_CONFIDENCE,
) -> DominationCheck:
    """Test P(X >= t) <= P(Y + a >= t) on a grid of t.

    The default grid is the set of distinct sample values, where the
    excess of the left-continuous empirical survival over the continuous
    exact one reaches its supremum. Grid points whose excess is above the
    DKW slack are counted as violations.
    """
    x = np.sort(np.asarray(samples_x, dtype=np.float64).ravel())
    if x.size == 0:
        raise EmptySample()
    if not np.all(np.isfinite(x)):
        raise DomainError("Samples must be finite.")
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"Rate alpha must be finite and > 0, got {alpha}.")
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"Confidence must be in (0, 1), got {confidence}.")

    points = np.unique(x) if grid is None else np.asarray(grid, dtype=np.float64).ravel()
    if points.size == 0:
        raise EmptySample()

    excess = empirical_survival(x, points) - shifted_exponential_survival(points, alpha, a)
    slack = dkw_slack(int(x.size), confidence)
    result = DominationCheck(
        sample_size=int(x.size),
        grid_size=int(points.size),
        violation_count=int(np.count_nonzero(excess > slack)),
        max_excess=float(np.max(excess)),
        dkw_slack=slack,
        confidence=confidence,
    )
    logger.info(
        f"check_domination: n={result.sample_size}, max_excess={result.max_excess:.3g}, "
        f"slack={slack:.3g}, verdict={result.verdict}"
    )
    return result
