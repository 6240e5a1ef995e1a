"""
Recurrence specifications and exact evaluation of

    X_0 = a_0,    X_n = a_n + sum_j b_j X_{floor(p_j n)}    (n >= 1).

Ratios p_j are exact rationals and every floor index is computed with integer
arithmetic. Branches are always summed in declaration order, so the dense,
sparse and kernel evaluators agree bit for bit.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any

import numpy as np

from .constants import DENSE_HORIZON_LIMIT, EXACT_HORIZON_SOFT_LIMIT, INT64_MAX
from .errors import (
    DcqError,
    EmptyBranches,
    IndexOverflow,
    InexactRatio,
    NegativeWeight,
    RatioOutOfRange,
    SubcriticalWeightSum,
)
from .tolls import TollSequence

logger = logging.getLogger(__name__)

BranchInput = tuple[Any, Any]


@dataclass(frozen=True)
class Branch:
    weight: Fraction
    ratio: Fraction

    @property
    def b(self) -> float:
        return float(self.weight)

    @property
    def p(self) -> float:
        return float(self.ratio)

    @property
    def log_p(self) -> float:
        """ln p, through log1p when p is close to 1."""
        if self.ratio > Fraction(1, 2):
            return math.log1p(-float(1 - self.ratio))
        return math.log(self.p)


@dataclass(frozen=True)
class RecurrenceSpec:
    """Validated branch list (b_j, p_j). Build it with `validate_spec`."""

    branches: tuple[Branch, ...]

    @property
    def m(self) -> int:
        return len(self.branches)

    @property
    def weights(self) -> np.ndarray:
        return np.array([br.b for br in self.branches], dtype=np.float64)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([br.p for br in self.branches], dtype=np.float64)

    @property
    def weight_sum(self) -> Fraction:
        return sum((br.weight for br in self.branches), Fraction(0))

    @property
    def ratios_at_most_half(self) -> bool:
        return all(br.ratio <= Fraction(1, 2) for br in self.branches)

    def to_dict(self) -> list[dict[str, Any]]:
        out = []
        for br in self.branches:
            b: int | float = (
                int(br.weight) if br.weight.denominator == 1 else float(br.weight)
            )
            out.append({"b": b, "p": _ratio_text(br.ratio)})
        return out


def _ratio_text(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def _coerce_ratio(index: int, p: Any) -> Fraction:
    if isinstance(p, bool) or isinstance(p, float):
        raise InexactRatio(index, p)
    if isinstance(p, (Rational, str)):
        try:
            return Fraction(p)
        except (ValueError, ZeroDivisionError) as e:
            raise DcqError(f"Branch {index}: cannot read ratio {p!r}: {e}") from e
    raise InexactRatio(index, p)


def _coerce_weight(index: int, b: Any) -> Fraction:
    if isinstance(b, bool):
        raise DcqError(f"Branch {index}: weight {b!r} is not a number.")
    try:
        # repr keeps the decimal the user wrote (0.4 -> 2/5) and round-trips to the same float
        value = Fraction(repr(float(b))) if isinstance(b, float) else Fraction(b)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise DcqError(f"Branch {index}: cannot read weight {b!r}: {e}") from e
    return value


def validate_spec(branches: Iterable[BranchInput | Branch]) -> RecurrenceSpec:
    """Check the hypotheses on (b_j, p_j) and return an immutable spec.

    Ratios must be exact: Fraction, int, or a string such as "1/3" or "0.25".
    Duplicate branches are kept as given.
    """
    parsed: list[Branch] = []
    for j, item in enumerate(branches):
        if isinstance(item, Branch):
            b_raw, p_raw = item.weight, item.ratio
        else:
            b_raw, p_raw = item
        p = _coerce_ratio(j, p_raw)
        if not (0 < p < 1):
            raise RatioOutOfRange(j, p)
        b = _coerce_weight(j, b_raw)
        if b < 0:
            raise NegativeWeight(j, b_raw)
        parsed.append(Branch(weight=b, ratio=p))

    if not parsed:
        raise EmptyBranches()

    spec = RecurrenceSpec(tuple(parsed))
    if spec.weight_sum <= 1:
        raise SubcriticalWeightSum(float(spec.weight_sum))

    logger.debug(f"validate_spec: m={spec.m}, branches={spec.to_dict()}")
    return spec


def floor_index(p: Fraction, n: int) -> int:
    """floor(p * n) by integer division, never through a float product."""
    if n < 0:
        raise DcqError(f"floor_index needs n >= 0, got {n}.")
    return (p.numerator * n) // p.denominator


# =============================================================================
# TRAJECTORIES
# =============================================================================


@dataclass(frozen=True, eq=False)
class Trajectory:
    spec: RecurrenceSpec
    horizon: int
    values: np.ndarray

    def ratios(self, s0: float, indices: Sequence[int] | np.ndarray) -> np.ndarray:
        """X_n / n^s0 at the given indices (all >= 1)."""
        idx = np.asarray(indices, dtype=np.int64)
        return self.values[idx] / np.power(idx.astype(np.float64), s0)


@dataclass(frozen=True, eq=False)
class KernelColumn:
    """K^j_n = X_n for the toll delta_j."""

    index: int
    horizon: int
    values: np.ndarray


def _integer_branches(spec: RecurrenceSpec, horizon: int) -> list[tuple[int, int, float]]:
    out = []
    for br in spec.branches:
        u, v = br.ratio.numerator, br.ratio.denominator
        if u * horizon > INT64_MAX:
            raise IndexOverflow(u, horizon)
        out.append((u, v, br.b))
    return out


def _forward(
    spec: RecurrenceSpec, x: np.ndarray, tolls: np.ndarray | None, start: int
) -> None:
    """Fill x[start:] in place; x[:start] must already hold final values.

    Works in blocks [lo, hi) whose floor indices all fall below lo, so each
    block is one vectorized gather per branch.
    """
    horizon = x.size - 1
    branches = _integer_branches(spec, horizon)
    lo = max(start, 1)
    blocks = 0
    while lo <= horizon:
        hi = min(horizon + 1, min(-(-v * lo // u) for u, v, _ in branches))
        n = np.arange(lo, hi, dtype=np.int64)
        if tolls is None:
            acc = np.zeros(hi - lo, dtype=np.float64)
        else:
            acc = np.array(tolls[lo:hi], dtype=np.float64)
        for u, v, w in branches:
            acc += w * x[(u * n) // v]
        x[lo:hi] = acc
        lo = hi
        blocks += 1
    logger.debug(f"_forward: horizon={horizon}, start={start}, blocks={blocks}")


def _allocate(horizon: int) -> np.ndarray:
    if horizon < 0:
        raise DcqError(f"Horizon must be >= 0, got {horizon}.")
    if horizon > DENSE_HORIZON_LIMIT:
        raise DcqError(
            f"Horizon {horizon} exceeds the dense limit {DENSE_HORIZON_LIMIT}; "
            "use evaluate_sparse for single indices."
        )
    try:
        return np.empty(horizon + 1, dtype=np.float64)
    except MemoryError as e:
        raise DcqError(f"Cannot allocate a trajectory of {horizon + 1} values.") from e


def evaluate_dense(spec: RecurrenceSpec, toll: TollSequence, horizon: int) -> Trajectory:
    """X_0..X_horizon by forward dynamic programming, O(m * horizon)."""
    x = _allocate(horizon)
    a = toll.dense(horizon)
    x[0] = a[0]
    _forward(spec, x, a, 1)
    x.setflags(write=False)
    return Trajectory(spec=spec, horizon=horizon, values=x)


def evaluate_sparse(spec: RecurrenceSpec, toll: TollSequence, n: int) -> float:
    """X_n visiting only indices reachable from n under k -> floor(p_j k)."""
    if n < 0:
        raise DcqError(f"Index must be >= 0, got {n}.")
    reachable = {n}
    frontier = [n]
    while frontier:
        k = frontier.pop()
        if k == 0:
            continue
        for br in spec.branches:
            child = floor_index(br.ratio, k)
            if child not in reachable:
                reachable.add(child)
                frontier.append(child)

    memo: dict[int, float] = {}
    for k in sorted(reachable):
        x = toll.value(k)
        if k > 0:
            for br in spec.branches:
                x = x + br.b * memo[floor_index(br.ratio, k)]
        memo[k] = x
    logger.debug(f"evaluate_sparse: n={n}, visited={len(reachable)}")
    return memo[n]


def evaluate_exact(
    spec: RecurrenceSpec, toll: TollSequence, horizon: int
) -> list[Fraction]:
    """Exact rational trajectory, meant as a test oracle for small horizons."""
    if horizon < 0:
        raise DcqError(f"Horizon must be >= 0, got {horizon}.")
    if horizon > EXACT_HORIZON_SOFT_LIMIT:
        logger.warning(
            f"evaluate_exact: horizon {horizon} is above {EXACT_HORIZON_SOFT_LIMIT}; "
            "rational arithmetic will be slow."
        )
    xs: list[Fraction] = [toll.exact(0)]
    for n in range(1, horizon + 1):
        x = toll.exact(n)
        for br in spec.branches:
            x += br.weight * xs[floor_index(br.ratio, n)]
        xs.append(x)
    return xs


def kernel_column(spec: RecurrenceSpec, j: int, horizon: int) -> KernelColumn:
    """K^j_0..K^j_horizon; identical to evaluate_dense with the toll delta_j."""
    if j < 0:
        raise DcqError(f"Impulse index must be >= 0, got {j}.")
    x = _allocate(horizon)
    x[: min(j, horizon + 1)] = 0.0
    if j <= horizon:
        x[j] = 1.0
        _forward(spec, x, None, j + 1)
    x.setflags(write=False)
    return KernelColumn(index=j, horizon=horizon, values=x)


def geometric_checkpoints(horizon: int, factor: float = 2.0) -> list[int]:
    """Indices 1, f, f^2, ... below horizon (rounded, deduplicated), then horizon."""
    if horizon < 1:
        raise DcqError(f"Checkpoints need horizon >= 1, got {horizon}.")
    if not factor > 1.0 or math.isinf(factor):
        raise DcqError(f"Checkpoint factor must be a finite number > 1, got {factor}.")
    points: list[int] = []
    k = 1.0
    while k < horizon:
        n = int(round(k))
        if not points or n > points[-1]:
            points.append(n)
        k *= factor
    if not points or points[-1] < horizon:
        points.append(horizon)
    return points
