"""
Random toll drivers.

A driver turns (seed, replica) into a realized toll a_0..a_N. Values for the
index block [k * SUBSTREAM_BLOCK, (k+1) * SUBSTREAM_BLOCK) come from their own
PCG64 stream keyed by (seed, replica, k), so a realization never depends on
the horizon it was drawn for or on the thread that drew it.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..constants import SUBSTREAM_BLOCK
from ..errors import DriverParameterError
from ..exponent import RegimeReport
from ..tolls import StoredToll, from_values

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64


# =============================================================================
# VARIANTS
# =============================================================================


class DriverVariant(ABC):
    """Law of a_n; `draw` fills the values for a contiguous index range."""

    @abstractmethod
    def draw(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def describe(self) -> dict[str, Any]: ...


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DriverParameterError(f"Driver parameter {name}={value} must be finite.")
    return value


@dataclass(frozen=True)
class UniformFamily(DriverVariant):
    """a_n ~ U(lo, hi); lo == hi gives the constant toll lo."""

    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self) -> None:
        if _finite("lo", self.lo) > _finite("hi", self.hi):
            raise DriverParameterError(f"Uniform needs lo <= hi, got lo={self.lo}, hi={self.hi}.")

    def draw(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random(indices.size)

    def describe(self) -> dict[str, Any]:
        return {"variant": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class BernoulliFamily(DriverVariant):
    q: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= _finite("q", self.q) <= 1.0:
            raise DriverParameterError(f"Bernoulli needs q in [0, 1], got {self.q}.")

    def draw(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray:
        return (rng.random(indices.size) < self.q).astype(np.float64)

    def describe(self) -> dict[str, Any]:
        return {"variant": "bernoulli", "q": self.q}


@dataclass(frozen=True)
class ShiftedExponentialFamily(DriverVariant):
    """a_n = shift + Exp(rate)."""

    rate: float = 1.0
    shift: float = 0.0

    def __post_init__(self) -> None:
        if not _finite("rate", self.rate) > 0:
            raise DriverParameterError(f"Exponential rate must be > 0, got {self.rate}.")
        _finite("shift", self.shift)

    def draw(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray:
        return self.shift + rng.exponential(1.0 / self.rate, indices.size)

    def describe(self) -> dict[str, Any]:
        return {"variant": "shifted_exponential", "rate": self.rate, "shift": self.shift}


BoundedMean = UniformFamily | BernoulliFamily | ShiftedExponentialFamily


@dataclass(frozen=True)
class CauchyStd(DriverVariant):
    """Standard Cauchy C(0, 1) by inverse CDF, tan(pi (u - 1/2))."""

    def draw(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray:
        return np.tan(np.pi * (rng.random(indices.size) - 0.5))

    def describe(self) -> dict[str, Any]:
        return {"variant": "cauchy"}


@dataclass(frozen=True)
class GeometricConvolution(DriverVariant):
    """a_n = sum of n independent geometric(q) counts on {0, 1, 2, ...}; a_0 = 0.

    The sum of n such counts is negative binomial, which is drawn directly.
    """

    q: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < _finite("q", self.q) < 1.0:
            raise DriverParameterError(f"Geometric needs q in (0, 1), got {self.q}.")

    def mean(self, n: int) -> float:
        return n * (1.0 - self.q) / self.q

    def mgf(self, t: float) -> float:
        """E exp(t G) for one geometric count, finite for t < -ln(1 - q)."""
        if not t < -math.log1p(-self.q):
            return math.inf
        return self.q / (1.0 - (1.0 - self.q) * math.exp(t))

    def draw(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray:
        counts = rng.negative_binomial(np.maximum(indices, 1), self.q).astype(np.float64)
        counts[indices == 0] = 0.0
        return counts

    def describe(self) -> dict[str, Any]:
        return {"variant": "geometric", "q": self.q}


# =============================================================================
# DRIVER SPEC
# =============================================================================


@dataclass(frozen=True)
class DriverSpec:
    variant: DriverVariant
    seed: int

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise DriverParameterError(f"Seed must be an integer, got {self.seed!r}.")
        if not 0 <= self.seed < SEED_LIMIT:
            raise DriverParameterError(f"Seed {self.seed} is outside the unsigned 64-bit range.")

    @property
    def is_bounded_mean(self) -> bool:
        return isinstance(self.variant, BoundedMean)

    def describe(self) -> dict[str, Any]:
        return {"kind": "driver", **self.variant.describe()}

    def to_dict(self) -> dict[str, Any]:
        return {**self.describe(), "seed": self.seed}


_VARIANTS: dict[str, tuple[type[DriverVariant], tuple[str, ...]]] = {
    "uniform": (UniformFamily, ("lo", "hi")),
    "bernoulli": (BernoulliFamily, ("q",)),
    "shifted_exponential": (ShiftedExponentialFamily, ("rate", "shift")),
    "cauchy": (CauchyStd, ()),
    "geometric": (GeometricConvolution, ("q",)),
}


def variant_from_dict(data: dict[str, Any]) -> DriverVariant:
    """Build a variant from {"variant": name, **params}."""
    name = data.get("variant")
    if name not in _VARIANTS:
        raise DriverParameterError(
            f"Unknown driver variant {name!r}; expected one of {sorted(_VARIANTS)}."
        )
    cls, fields = _VARIANTS[name]
    unknown = set(data) - set(fields) - {"variant", "kind", "seed"}
    if unknown:
        raise DriverParameterError(f"Driver {name!r} does not take {sorted(unknown)}.")
    params: dict[str, float] = {}
    for key in fields:
        if key in data:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DriverParameterError(f"Driver parameter {key}={value!r} is not a number.")
            params[key] = float(value)
    return cls(**params)


def substream(seed: int, replica: int, block: int) -> np.random.Generator:
    """Independent generator for (seed, replica, index block)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(replica, block)))
    )


def sample_toll(driver: DriverSpec, horizon: int, replica: int = 0) -> StoredToll:
    """Realize a_0..a_horizon for one replica."""
    if horizon < 0:
        raise DriverParameterError(f"Horizon must be >= 0, got {horizon}.")
    if replica < 0:
        raise DriverParameterError(f"Replica index must be >= 0, got {replica}.")
    values = np.empty(horizon + 1, dtype=np.float64)
    for block, lo in enumerate(range(0, horizon + 1, SUBSTREAM_BLOCK)):
        hi = min(lo + SUBSTREAM_BLOCK, horizon + 1)
        rng = substream(driver.seed, replica, block)
        values[lo:hi] = driver.variant.draw(rng, np.arange(lo, hi, dtype=np.int64))
    logger.debug(
        f"sample_toll: variant={driver.variant.describe()['variant']}, "
        f"horizon={horizon}, replica={replica}"
    )
    return from_values(values, origin={**driver.to_dict(), "replica": replica})


def driver_hypotheses(driver: DriverSpec, regime: RegimeReport) -> list[str]:
    """Warnings for drivers whose convergence results need a stronger regime."""
    warnings: list[str] = []
    if isinstance(driver.variant, CauchyStd) and not regime.s0_gt_1:
        warnings.append(
            f"Cauchy tolls need sum b_j p_j > 1 (got {regime.first_moment:.6g}); "
            "almost-sure convergence of X_n / n^s0 is not guaranteed."
        )
    if isinstance(driver.variant, GeometricConvolution) and not regime.s0_gt_2:
        warnings.append(
            f"Geometric convolution tolls need sum b_j p_j^2 > 1 (got "
            f"{regime.second_moment:.6g}) for exponential moments of the limit."
        )
    for message in warnings:
        logger.warning(f"driver_hypotheses: {message}")
    return warnings
