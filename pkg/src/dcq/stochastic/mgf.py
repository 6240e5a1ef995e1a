"""
Exponential-moment bound for X_n / n^s0 under geometric-type tolls.

If every |a_j| is dominated by the j-fold convolution of a law that is itself
dominated by Y + a with Y ~ Exp(rate), then for t < rate

    E exp(t X_n / n^s0) <= exp(M a sum_{j=1}^{n+1} j^-s0)
                           * prod_{j=0}^{n} (1 - (t/rate) / (j+1)^s0)^-j

where the product factors are Gamma(j, rate) moment generating functions.
Gamma laws are parametrized by rate throughout.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, DriverParameterError, OutOfValidityRegion
from ..recurrence import RecurrenceSpec, kernel_column
from .domination import exp_shift

logger = logging.getLogger(__name__)

# Kernel constants estimated below this horizon are flagged as unreliable.
KERNEL_CONSTANT_MIN_HORIZON = 10**5


@dataclass(frozen=True)
class MgfBoundParams:
    """Inputs of the bound; `single_law` uses exponent -1 for every factor.

    The single-law form covers tolls all dominated by one law (s0 > 1)
    instead of by its n-fold convolution.
    """

    M: float
    a: float
    rate: float
    s0: float
    n: int
    t: float
    single_law: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.M) and self.M > 0):
            raise DomainError(f"Kernel constant M must be finite and > 0, got {self.M}.")
        if not (math.isfinite(self.a) and self.a >= 0):
            raise DomainError(f"Shift a must be finite and >= 0, got {self.a}.")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError(f"Rate must be finite and > 0, got {self.rate}.")
        if not self.s0 > 0:
            raise DomainError(f"s0 must be > 0, got {self.s0}.")
        if self.n < 0:
            raise DomainError(f"Horizon n must be >= 0, got {self.n}.")
        if not math.isfinite(self.t):
            raise DomainError(f"Evaluation point t must be finite, got {self.t}.")

    def to_dict(self) -> dict[str, object]:
        return {
            "M": self.M,
            "a": self.a,
            "rate": self.rate,
            "s0": self.s0,
            "n": self.n,
            "t": self.t,
            "single_law": self.single_law,
        }


def log_mgf_upper_bound(params: MgfBoundParams) -> float:
    """Natural log of the bound, summed in log space."""
    if params.t >= params.rate:
        raise OutOfValidityRegion(
            f"t={params.t} must be < rate={params.rate}; the factor at j=0 has a "
            "non-positive base."
        )
    j = np.arange(params.n + 1, dtype=np.float64)
    scale = np.power(j + 1.0, -params.s0)
    shift_term = params.M * params.a * math.fsum(scale.tolist())
    bases = np.log1p(-(params.t / params.rate) * scale)
    exponents = np.ones_like(j) if params.single_law else j
    gamma_term = math.fsum((-exponents * bases).tolist())
    return shift_term + gamma_term


def mgf_upper_bound(params: MgfBoundParams) -> float:
    log_bound = log_mgf_upper_bound(params)
    bound = math.exp(log_bound) if log_bound < 709.0 else math.inf
    logger.debug(f"mgf_upper_bound: params={params.to_dict()}, log_bound={log_bound!r}")
    return bound


def calibrate_geometric(q: float) -> tuple[float, float]:
    """(rate, a) for one geometric(q) count on {0, 1, ...}.

    The rate is half the radius -ln(1 - q) of the geometric MGF and a is
    the matching exponential shift.
    """
    if not 0.0 < q < 1.0:
        raise DriverParameterError(f"Geometric needs q in (0, 1), got {q}.")
    rate = -math.log1p(-q) / 2.0
    mgf = q / (1.0 - (1.0 - q) * math.exp(rate))
    return rate, exp_shift(rate, mgf)


@dataclass(frozen=True)
class KernelConstant:
    M: float
    horizon: int
    growth_max: float
    inverse_max: float
    reliable: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "M": self.M,
            "horizon": self.horizon,
            "growth_max": self.growth_max,
            "inverse_max": self.inverse_max,
            "reliable": self.reliable,
            "caveat": f"bounds kernel ratios for indices <= {self.horizon} only",
        }


def estimate_kernel_constant(spec: RecurrenceSpec, s0: float, horizon: int) -> KernelConstant:
    """M = max_{1<=n<=N} K0_n / n^s0 * max_{0<=j<=N} (j+1)^s0 / K0_j from one kernel column."""
    if horizon < 1:
        raise DomainError(f"Kernel constant needs horizon >= 1, got {horizon}.")
    reliable = horizon >= KERNEL_CONSTANT_MIN_HORIZON
    if not reliable:
        logger.warning(
            f"estimate_kernel_constant: horizon {horizon} < {KERNEL_CONSTANT_MIN_HORIZON}; "
            "M may be underestimated."
        )
    k0 = kernel_column(spec, 0, horizon).values
    n = np.arange(horizon + 1, dtype=np.float64)
    growth_max = float(np.max(k0[1:] / np.power(n[1:], s0)))
    inverse_max = float(np.max(np.power(n + 1.0, s0) / k0))
    M = growth_max * inverse_max
    logger.info(f"estimate_kernel_constant: horizon={horizon}, M={M!r}")
    return KernelConstant(
        M=M,
        horizon=horizon,
        growth_max=growth_max,
        inverse_max=inverse_max,
        reliable=reliable,
    )
