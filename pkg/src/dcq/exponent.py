"""
Critical exponent s0: the unique positive root of f(s) = sum_j b_j p_j^s = 1,
plus the moment regime (s0 > 1, s0 > 2) and a heuristic check of the
irrationality hypothesis on log p_j / log p_l.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .constants import (
    BRACKET_WIDTH_FACTOR,
    CONTINUED_FRACTION_DEPTH,
    CONVERGENT_MATCH_TOL,
    CONVERGENT_MAX_DENOMINATOR,
    CONVERGENT_MAX_QUALITY,
    DEFAULT_REPORT_TOL,
    DEFAULT_ROOT_TOL,
    RESOLUTION_EPS_FACTOR,
    SOLVER_MAX_ITERATIONS,
)
from .errors import InternalInconsistency, ToleranceUnreachable
from .recurrence import RecurrenceSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalExponent:
    s0: float
    residual: float
    bracket: tuple[float, float]
    iterations: int

    def to_dict(self) -> dict[str, object]:
        return {
            "s0": self.s0,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
        }


def characteristic(spec: RecurrenceSpec, s: float) -> float:
    """f(s) = sum_j b_j p_j^s, evaluated as exp(s ln p_j)."""
    return math.fsum(br.b * math.exp(s * br.log_p) for br in spec.branches)


def characteristic_slope(spec: RecurrenceSpec, s: float) -> float:
    """f'(s) = sum_j b_j p_j^s ln p_j (negative)."""
    return math.fsum(br.b * math.exp(s * br.log_p) * br.log_p for br in spec.branches)


def solve_exponent(spec: RecurrenceSpec, tol: float = DEFAULT_ROOT_TOL) -> CriticalExponent:
    """Bracketed Newton/bisection on f(s) - 1 until |f(s0) - 1| <= tol.

    The bracket starts at [0, s_hi] with s_hi doubled from 1 until f(s_hi) < 1;
    Newton steps leaving the bracket are replaced by bisection. After
    convergence the bracket is tightened to at most 64 * tol (or four ulps
    of s0 when that is wider).
    """
    floor = RESOLUTION_EPS_FACTOR * sys.float_info.epsilon * spec.m
    if not tol > 0 or tol < floor:
        raise ToleranceUnreachable(
            f"Residual tolerance {tol} is below the double-precision floor {floor:.3g}."
        )

    def g(s: float) -> float:
        return characteristic(spec, s) - 1.0

    lo, hi = 0.0, 1.0
    x: float | None = None
    while True:
        gh = g(hi)
        if gh > 0:
            lo, hi = hi, 2.0 * hi
        elif gh == 0:
            x, hi = hi, 2.0 * hi
            break
        else:
            break
    if x is None:
        x = 0.5 * (lo + hi)

    iterations = 0
    gx = g(x)
    while True:
        iterations += 1
        if gx > 0:
            lo = x
        elif gx < 0:
            hi = x
        if abs(gx) <= tol:
            break
        if iterations >= SOLVER_MAX_ITERATIONS:
            raise ToleranceUnreachable(
                f"No point with |f(s)-1| <= {tol} found in {iterations} iterations "
                f"(bracket [{lo!r}, {hi!r}])."
            )
        slope = characteristic_slope(spec, x)
        step = x - gx / slope if slope != 0 else math.nan
        x = step if lo < step < hi else 0.5 * (lo + hi)
        logger.debug(f"solve_exponent: iter={iterations}, s={x!r}, bracket=[{lo!r}, {hi!r}]")
        gx = g(x)

    # at least four ulps of s0
    width_cap = max(BRACKET_WIDTH_FACTOR * tol, 4.0 * math.ulp(x))
    if hi - lo > width_cap:
        w = width_cap / 4.0
        if g(x - w) > 0 and g(x + w) < 0:
            lo, hi = max(lo, x - w), min(hi, x + w)

    while hi - lo > width_cap or not (lo < x < hi and abs(gx) <= tol):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or iterations >= 2 * SOLVER_MAX_ITERATIONS:
            raise ToleranceUnreachable(f"Bracket cannot shrink below {hi - lo!r}.")
        iterations += 1
        gm = g(mid)
        if gm > 0:
            lo = mid
        elif gm < 0:
            hi = mid
        else:
            x, gx = mid, gm
            lo, hi = 0.5 * (lo + mid), 0.5 * (mid + hi)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
            gx = g(x)

    result = CriticalExponent(s0=x, residual=abs(gx), bracket=(lo, hi), iterations=iterations)
    logger.info(
        f"solve_exponent: s0={x!r}, residual={result.residual:.3g}, iterations={iterations}"
    )
    return result


# =============================================================================
# REGIME REPORT
# =============================================================================


@dataclass(frozen=True)
class PairCheck:
    """Continued-fraction test of r = log p_j / log p_l."""

    j: int
    ell: int
    ratio: float
    convergent: Fraction | None
    error: float | None
    quality: float | None

    @property
    def looks_rational(self) -> bool:
        return self.convergent is not None

    def to_dict(self) -> dict[str, object]:
        return {
            "j": self.j,
            "ell": self.ell,
            "ratio": self.ratio,
            "convergent": None if self.convergent is None else str(self.convergent),
            "error": self.error,
            "quality": self.quality,
        }


@dataclass(frozen=True)
class RegimeReport:
    s0: float
    weight_sum: float
    first_moment: float
    second_moment: float
    s0_gt_1: bool
    s0_gt_2: bool
    pair_checks: list[PairCheck] = field(default_factory=list)
    rationality_warnings: list[PairCheck] = field(default_factory=list)
    hypothesis_warning: str | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "s0": self.s0,
            "weight_sum": self.weight_sum,
            "first_moment": self.first_moment,
            "second_moment": self.second_moment,
            "s0_gt_1": self.s0_gt_1,
            "s0_gt_2": self.s0_gt_2,
            "pair_checks": [p.to_dict() for p in self.pair_checks],
            "rationality_warnings": [p.to_dict() for p in self.rationality_warnings],
            "hypothesis_warning": self.hypothesis_warning,
        }


def continued_fraction(x: Fraction, depth: int = CONTINUED_FRACTION_DEPTH) -> list[int]:
    """Partial quotients of x, exact, at most `depth` terms."""
    terms: list[int] = []
    while len(terms) < depth:
        a = math.floor(x)
        terms.append(a)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return terms


def rational_match(
    r: float,
    depth: int = CONTINUED_FRACTION_DEPTH,
    max_denominator: int = CONVERGENT_MAX_DENOMINATOR,
    tol: float = CONVERGENT_MATCH_TOL,
    max_quality: float = CONVERGENT_MAX_QUALITY,
) -> tuple[Fraction, float, float] | None:
    """First convergent h/k of r with k <= max_denominator, |r - h/k| <= tol and
    k^2 |r - h/k| <= max_quality; None when no convergent qualifies."""
    exact = Fraction(r)
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    for a in continued_fraction(exact, depth):
        h_prev, h = a * h_prev + h, h_prev
        k_prev, k = a * k_prev + k, k_prev
        num, den = h_prev, k_prev
        if den > max_denominator:
            break
        conv = Fraction(num, den)
        error = float(abs(exact - conv))
        quality = den * den * error
        if error <= tol and quality <= max_quality:
            return conv, error, quality
    return None


def check_pair(spec: RecurrenceSpec, j: int, ell: int) -> PairCheck:
    r = spec.branches[j].log_p / spec.branches[ell].log_p
    match = rational_match(r)
    if match is None:
        return PairCheck(j=j, ell=ell, ratio=r, convergent=None, error=None, quality=None)
    conv, error, quality = match
    return PairCheck(j=j, ell=ell, ratio=r, convergent=conv, error=error, quality=quality)


def regime_report(
    spec: RecurrenceSpec, s0: float, tol: float = DEFAULT_REPORT_TOL
) -> RegimeReport:
    """Moment sums, their equivalence with s0 > 1 / s0 > 2, and the rationality heuristic."""
    weight_sum = float(spec.weight_sum)
    first = math.fsum(br.b * br.p for br in spec.branches)
    second = math.fsum(br.b * br.p * br.p for br in spec.branches)

    for moment, threshold in ((first, 1.0), (second, 2.0)):
        if abs(moment - 1.0) > tol and abs(s0 - threshold) > tol:
            if (moment > 1.0) != (s0 > threshold):
                raise InternalInconsistency(
                    f"Moment sum {moment!r} vs 1 disagrees with s0={s0!r} vs {threshold}."
                )

    checks = [
        check_pair(spec, j, ell)
        for j in range(spec.m)
        for ell in range(j + 1, spec.m)
    ]
    warnings: list[PairCheck] = []
    hypothesis_warning: str | None = None
    if not checks:
        hypothesis_warning = (
            "Irrationality hypothesis unsatisfiable: a single branch has no pair "
            "(j, l) with log p_j / log p_l irrational; X_n / n^s0 may oscillate."
        )
    elif all(c.looks_rational for c in checks):
        warnings = checks
        hypothesis_warning = (
            "Every log p_j / log p_l looks rational; the irrationality hypothesis "
            "likely fails and X_n / n^s0 may oscillate without a limit."
        )
    if hypothesis_warning:
        logger.warning(f"regime_report: {hypothesis_warning}")

    return RegimeReport(
        s0=s0,
        weight_sum=weight_sum,
        first_moment=first,
        second_moment=second,
        s0_gt_1=first > 1.0,
        s0_gt_2=second > 1.0,
        pair_checks=checks,
        rationality_warnings=warnings,
        hypothesis_warning=hypothesis_warning,
    )
