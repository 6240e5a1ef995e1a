"""
Limit coefficients l_j = lim K^j_n / n^s0 and the limit L = sum_j l_j a_j.

With D = sum_j b_j p_j^s0 ln(1/p_j):

    l_0    = (sum_j b_j - 1) / (s0 D)
    l_n0   = (1/D) sum_j b_j p_j^s0 int_{max(n0, (n0+1) p_j)}^{n0+1} t^-(s0+1) dt

The integrals are evaluated in closed form. When every p_j <= 1/2 the lower
bound is always n0 and the coefficients telescope, which gives the exact tail
sum_{j>J} l_j = (J+1)^-s0 / (s0 D); otherwise the same expression bounds it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .constants import DUAL_FORMULA_TOL, EMPIRICAL_WINDOW_SAMPLES, IDENTITY_TOL, INT64_MAX
from .errors import DcqError, EnvelopeTooWeak, IndexOverflow, InternalInconsistency
from .exponent import characteristic
from .recurrence import RecurrenceSpec, kernel_column
from .tolls import TollSequence

logger = logging.getLogger(__name__)

# Exact truncation bounds for finitely supported tolls are summed up to this many terms.
EXACT_TAIL_TERMS = 10**7


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    s0: float
    D: float
    values: np.ndarray
    tail_constant: float
    tail_exact: bool

    @property
    def J(self) -> int:
        return int(self.values.size) - 1

    def to_dict(self) -> dict[str, object]:
        return {
            "s0": self.s0,
            "D": self.D,
            "J": self.J,
            "values": [float(v) for v in self.values],
            "tail_constant": self.tail_constant,
            "tail_exact": self.tail_exact,
        }


@dataclass(frozen=True)
class Envelope:
    """User guarantee |a_j| <= c * j^eta for j >= 1."""

    c: float
    eta: float


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    J: int
    tail_bound: float | None
    envelope: Envelope | None
    heuristic: bool
    truncated_support: bool = False

    def to_dict(self) -> dict[str, object]:
        return {
            "value": self.value,
            "J": self.J,
            "tail_bound": self.tail_bound,
            "tail_bound_available": self.tail_bound is not None,
            "envelope": None
            if self.envelope is None
            else {"c": self.envelope.c, "eta": self.envelope.eta},
            "heuristic": self.heuristic,
            "truncated_support": self.truncated_support,
        }


def decay_denominator(spec: RecurrenceSpec, s0: float) -> float:
    """D = sum_j b_j p_j^s0 ln(1/p_j) (> 0)."""
    return math.fsum(-br.b * math.exp(s0 * br.log_p) * br.log_p for br in spec.branches)


def _identity_residual(spec: RecurrenceSpec, s0: float, tol: float = IDENTITY_TOL) -> float:
    residual = abs(characteristic(spec, s0) - 1.0)
    if not s0 > 0 or residual > max(tol, IDENTITY_TOL):
        raise InternalInconsistency(
            f"sum_j b_j p_j^s0 = 1 fails at s0={s0!r} (residual {residual:.3g})."
        )
    return residual


def _power_gap(lo: np.ndarray, log_ratio: np.ndarray, s0: float) -> np.ndarray:
    """lo^-s0 - hi^-s0 with hi = lo * exp(log_ratio), free of cancellation."""
    return np.power(lo, -s0) * -np.expm1(-s0 * log_ratio)


def _unit_gap(n0: np.ndarray, s0: float) -> np.ndarray:
    """n0^-s0 - (n0+1)^-s0."""
    lo = n0.astype(np.float64)
    return _power_gap(lo, np.log1p(1.0 / lo), s0)


def _ell_general(spec: RecurrenceSpec, s0: float, D: float, n0: np.ndarray) -> np.ndarray:
    if int(n0.max(initial=0)) + 1 > INT64_MAX // max(
        br.ratio.denominator for br in spec.branches
    ):
        raise IndexOverflow(max(br.ratio.denominator for br in spec.branches), int(n0.max()))
    acc = np.zeros(n0.size, dtype=np.float64)
    unit = _unit_gap(n0, s0)
    upper = np.power((n0 + 1).astype(np.float64), -s0)
    for br in spec.branches:
        u, v = br.ratio.numerator, br.ratio.denominator
        # lower bound is n0 exactly when (n0+1) p <= n0
        at_n0 = u * (n0 + 1) <= v * n0
        shifted = upper * np.expm1(-s0 * br.log_p)
        term = np.where(at_n0, unit, shifted)
        acc += br.b * math.exp(s0 * br.log_p) * term
    return acc / (s0 * D)


def _ell_simplified(s0: float, D: float, n0: np.ndarray) -> np.ndarray:
    return _unit_gap(n0, s0) / (s0 * D)


def ell_zero(spec: RecurrenceSpec, s0: float, identity_tol: float = IDENTITY_TOL) -> float:
    """l_0 = (sum_j b_j - 1) / (s0 D), checked against the direct integral form.

    `identity_tol` is the largest accepted |f(s0) - 1|; pass the solver tolerance
    when s0 was solved more loosely than IDENTITY_TOL.
    """
    residual = _identity_residual(spec, s0, identity_tol)
    D = decay_denominator(spec, s0)
    direct = math.fsum(
        br.b * math.exp(s0 * br.log_p) * math.expm1(-s0 * br.log_p) / s0
        for br in spec.branches
    ) / D
    weight_sum = float(spec.weight_sum)
    reduced = (weight_sum - 1.0) / (s0 * D)
    tol = DUAL_FORMULA_TOL + residual / (weight_sum - 1.0)
    if abs(direct - reduced) > tol * abs(reduced):
        raise InternalInconsistency(
            f"l_0 forms disagree: {direct!r} vs {reduced!r} (tolerance {tol:.3g})."
        )
    return reduced


def _ell_range(spec: RecurrenceSpec, s0: float, D: float, residual: float, n0: np.ndarray) -> np.ndarray:
    general = _ell_general(spec, s0, D, n0)
    if spec.ratios_at_most_half and n0.size:
        simplified = _ell_simplified(s0, D, n0)
        tol = DUAL_FORMULA_TOL + residual
        worst = float(np.max(np.abs(general - simplified) / simplified))
        if worst > tol:
            raise InternalInconsistency(
                f"General and simplified l_n0 disagree by {worst:.3g} (tolerance {tol:.3g})."
            )
    return general


def ell(spec: RecurrenceSpec, s0: float, n0: int, identity_tol: float = IDENTITY_TOL) -> float:
    """l_n0 for n0 >= 1 from the max-bounded integral formula."""
    if n0 < 1:
        raise DcqError(f"ell needs n0 >= 1, got {n0}; use ell_zero for n0 = 0.")
    residual = _identity_residual(spec, s0, identity_tol)
    D = decay_denominator(spec, s0)
    return float(_ell_range(spec, s0, D, residual, np.array([n0], dtype=np.int64))[0])


def tail_constant(s0: float, D: float, J: int) -> float:
    """(J+1)^-s0 / (s0 D): sum_{j>J} l_j when all p <= 1/2, an upper bound otherwise."""
    return (J + 1.0) ** -s0 / (s0 * D)


def limit_total(spec: RecurrenceSpec, s0: float, identity_tol: float = IDENTITY_TOL) -> float:
    """sum_j l_j = (sum_j b_j) / (s0 D), the limit for the toll a = 1."""
    _identity_residual(spec, s0, identity_tol)
    return float(spec.weight_sum) / (s0 * decay_denominator(spec, s0))


def coefficient_table(
    spec: RecurrenceSpec, s0: float, J: int, identity_tol: float = IDENTITY_TOL
) -> CoefficientTable:
    if J < 0:
        raise DcqError(f"Truncation index must be >= 0, got {J}.")
    residual = _identity_residual(spec, s0, identity_tol)
    D = decay_denominator(spec, s0)
    values = np.empty(J + 1, dtype=np.float64)
    values[0] = ell_zero(spec, s0, identity_tol)
    if J >= 1:
        values[1:] = _ell_range(spec, s0, D, residual, np.arange(1, J + 1, dtype=np.int64))
    values.setflags(write=False)
    table = CoefficientTable(
        s0=s0,
        D=D,
        values=values,
        tail_constant=tail_constant(s0, D, J),
        tail_exact=spec.ratios_at_most_half,
    )
    logger.info(
        f"coefficient_table: J={J}, D={D!r}, l_0={values[0]!r}, tail={table.tail_constant!r}"
    )
    return table


def envelope_tail(s0: float, D: float, J: int, envelope: Envelope) -> float:
    """Bound on c * sum_{j>J} j^eta l_j.

    Uses l_j <= (j^-s0 - (j+1)^-s0)/(s0 D) <= j^-(s0+1)/D and compares the
    decreasing sum with its integral from J+1.
    """
    start = J + 1.0
    expo = envelope.eta - s0
    return envelope.c / D * (start ** (expo - 1.0) + start**expo / (s0 - envelope.eta))


def limit_estimate(
    spec: RecurrenceSpec,
    s0: float,
    toll: TollSequence,
    J: int,
    envelope: Envelope | None = None,
    identity_tol: float = IDENTITY_TOL,
) -> LimitEstimate:
    """Truncated limit sum_{j<=J} l_j a_j with a certified tail bound when possible.

    Finitely supported tolls get an exact bound; otherwise an envelope
    (c, eta) with eta < s0 is needed, and without one the estimate is
    reported as heuristic.
    """
    if envelope is not None:
        if not envelope.eta < s0:
            raise EnvelopeTooWeak(envelope.eta, s0)
        if envelope.c < 0:
            raise DcqError(f"Envelope constant c must be >= 0, got {envelope.c}.")

    table = coefficient_table(spec, s0, J, identity_tol)
    a = toll.dense(J)
    value = math.fsum((table.values * a).tolist())

    support = toll.support
    tail_bound: float | None = None
    truncated = False
    if support is not None and support <= J:
        tail_bound = 0.0
    elif support is not None and support - J <= EXACT_TAIL_TERMS:
        wide = coefficient_table(spec, s0, support, identity_tol)
        tail_bound = math.fsum(
            (wide.values[J + 1 :] * np.abs(toll.dense(support)[J + 1 :])).tolist()
        )
        truncated = True
        logger.warning(
            f"limit_estimate: toll support ends at {support} > J={J}; "
            f"truncation drops {tail_bound!r}."
        )
    elif envelope is not None:
        tail_bound = envelope_tail(s0, table.D, J, envelope)

    heuristic = tail_bound is None
    if heuristic:
        logger.warning(
            "limit_estimate: no envelope and unbounded toll support; tail bound not available."
        )
    return LimitEstimate(
        value=value,
        J=J,
        tail_bound=tail_bound,
        envelope=envelope,
        heuristic=heuristic,
        truncated_support=truncated,
    )


def window_indices(horizon: int, samples: int = EMPIRICAL_WINDOW_SAMPLES) -> np.ndarray:
    """Geometrically spaced distinct indices in [horizon/2, horizon]."""
    lo = max(1.0, horizon / 2.0)
    points = np.rint(np.geomspace(lo, horizon, samples)).astype(np.int64)
    return np.unique(np.clip(points, 1, horizon))


def empirical_ell(
    spec: RecurrenceSpec,
    s0: float,
    j: int,
    horizon: int,
    samples: int = EMPIRICAL_WINDOW_SAMPLES,
) -> float:
    """Window average of K^j_n / n^s0 over geometric samples in [horizon/2, horizon]."""
    if horizon < 2 * max(j, 1):
        raise DcqError(f"Horizon {horizon} is too small for impulse index {j}.")
    column = kernel_column(spec, j, horizon)
    idx = window_indices(horizon, samples)
    ratios = column.values[idx] / np.power(idx.astype(np.float64), s0)
    estimate = float(np.mean(ratios))
    logger.info(f"empirical_ell: j={j}, horizon={horizon}, estimate={estimate!r}")
    return estimate
