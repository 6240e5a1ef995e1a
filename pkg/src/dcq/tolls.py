"""
Toll sequences (a_n): the per-call cost added at size n.

A toll is either a dense stored array or a deterministic generator keyed by
index. Every toll answers the same index with the same value, and tolls with
finitely many non-zero entries report the last such index as `support`.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import DcqError, TollTooShort

logger = logging.getLogger(__name__)


class TollSequence(ABC):
    """Indexed source of toll values a_0, a_1, ..."""

    @property
    def support(self) -> int | None:
        """Last index that may hold a non-zero value, None if unbounded."""
        return None

    @abstractmethod
    def value(self, n: int) -> float: ...

    def dense(self, horizon: int) -> np.ndarray:
        """Return a_0..a_horizon as a float64 array."""
        return np.array([self.value(n) for n in range(horizon + 1)], dtype=np.float64)

    def exact(self, n: int) -> Fraction:
        raise DcqError(f"{type(self).__name__} has no exact rational values.")

    @abstractmethod
    def describe(self) -> dict[str, Any]: ...


@dataclass(frozen=True)
class ImpulseToll(TollSequence):
    """delta_j: one at index j, zero elsewhere."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise DcqError(f"Impulse index must be >= 0, got {self.index}.")

    @property
    def support(self) -> int | None:
        return self.index

    def value(self, n: int) -> float:
        return 1.0 if n == self.index else 0.0

    def dense(self, horizon: int) -> np.ndarray:
        out = np.zeros(horizon + 1, dtype=np.float64)
        if self.index <= horizon:
            out[self.index] = 1.0
        return out

    def exact(self, n: int) -> Fraction:
        return Fraction(1) if n == self.index else Fraction(0)

    def describe(self) -> dict[str, Any]:
        return {"kind": "impulse", "j": self.index}


@dataclass(frozen=True)
class PrefixToll(TollSequence):
    """I_n0: one for indices i <= n0, zero beyond."""

    n0: int

    def __post_init__(self) -> None:
        if self.n0 < 0:
            raise DcqError(f"Prefix end must be >= 0, got {self.n0}.")

    @property
    def support(self) -> int | None:
        return self.n0

    def value(self, n: int) -> float:
        return 1.0 if n <= self.n0 else 0.0

    def dense(self, horizon: int) -> np.ndarray:
        out = np.zeros(horizon + 1, dtype=np.float64)
        out[: min(self.n0, horizon) + 1] = 1.0
        return out

    def exact(self, n: int) -> Fraction:
        return Fraction(1) if n <= self.n0 else Fraction(0)

    def describe(self) -> dict[str, Any]:
        return {"kind": "prefix", "n0": self.n0}


@dataclass(frozen=True)
class ConstantToll(TollSequence):
    level: Fraction

    @property
    def support(self) -> int | None:
        return None if self.level != 0 else -1

    def value(self, n: int) -> float:
        return float(self.level)

    def dense(self, horizon: int) -> np.ndarray:
        return np.full(horizon + 1, float(self.level), dtype=np.float64)

    def exact(self, n: int) -> Fraction:
        return self.level

    def describe(self) -> dict[str, Any]:
        return {"kind": "constant", "value": float(self.level)}


@dataclass(frozen=True, eq=False)
class StoredToll(TollSequence):
    """Dense stored toll. Reading past the stored length is an error.

    With `zero_tail` the sequence is known to vanish after the stored values,
    which gives it a finite support.
    """

    values: np.ndarray
    exact_values: tuple[Fraction, ...] | None = None
    zero_tail: bool = False
    origin: dict[str, Any] = field(default_factory=lambda: {"kind": "values"})

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise DcqError("Stored toll needs a non-empty one-dimensional array.")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def support(self) -> int | None:
        if not self.zero_tail:
            return None
        nonzero = np.flatnonzero(self.values)
        return int(nonzero[-1]) if nonzero.size else -1

    def value(self, n: int) -> float:
        if n >= self.values.size:
            if self.zero_tail:
                return 0.0
            raise TollTooShort(int(self.values.size), n)
        return float(self.values[n])

    def dense(self, horizon: int) -> np.ndarray:
        if horizon >= self.values.size:
            if not self.zero_tail:
                raise TollTooShort(int(self.values.size), horizon)
            padded = np.zeros(horizon + 1, dtype=np.float64)
            padded[: self.values.size] = self.values
            return padded
        return self.values[: horizon + 1]

    def exact(self, n: int) -> Fraction:
        if n >= self.values.size:
            if self.zero_tail:
                return Fraction(0)
            raise TollTooShort(int(self.values.size), n)
        if self.exact_values is None:
            return Fraction(float(self.values[n]))
        return self.exact_values[n]

    def describe(self) -> dict[str, Any]:
        return dict(self.origin)


@dataclass(frozen=True, eq=False)
class FunctionToll(TollSequence):
    """Deterministic generator keyed by index."""

    fn: Callable[[int], float]
    name: str = "function"

    def value(self, n: int) -> float:
        return float(self.fn(n))

    def describe(self) -> dict[str, Any]:
        return {"kind": "function", "name": self.name}


# =============================================================================
# CONSTRUCTORS
# =============================================================================


def impulse(j: int) -> ImpulseToll:
    return ImpulseToll(j)


def prefix(n0: int) -> PrefixToll:
    return PrefixToll(n0)


def constant(level: int | float | str | Fraction) -> ConstantToll:
    if isinstance(level, float):
        return ConstantToll(Fraction(repr(level)))
    return ConstantToll(Fraction(level))


def from_values(
    values: Sequence[float | int | Fraction] | np.ndarray,
    origin: dict[str, Any] | None = None,
    zero_tail: bool = False,
) -> StoredToll:
    """Wrap a stored array. Fractions and ints keep their exact values."""
    exact: tuple[Fraction, ...] | None = None
    if isinstance(values, np.ndarray):
        arr = values.astype(np.float64)
    else:
        if all(isinstance(v, (int, Fraction)) for v in values):
            exact = tuple(Fraction(v) for v in values)
        arr = np.array([float(v) for v in values], dtype=np.float64)
    return StoredToll(
        arr,
        exact,
        zero_tail,
        origin or {"kind": "values", "length": int(arr.size)},
    )


def from_function(fn: Callable[[int], float], name: str = "function") -> FunctionToll:
    return FunctionToll(fn, name)
