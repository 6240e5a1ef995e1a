"""
Test error handling: exception hierarchy, exit codes and messages.
"""

from fractions import Fraction

import pytest

from dcq import errors
from dcq.coefficients import Envelope, limit_estimate
from dcq.exponent import solve_exponent
from dcq.recurrence import evaluate_dense, evaluate_sparse, validate_spec
from dcq.tolls import constant, from_values


class TestHierarchy:
    """Every library error is a DcqError and a ValueError."""

    @pytest.mark.parametrize(
        "exc,code",
        [
            (errors.EmptyBranches(), 2),
            (errors.NegativeWeight(0, Fraction(-1)), 2),
            (errors.SubcriticalWeightSum(Fraction(1, 2)), 2),
            (errors.TollTooShort(3, 10), 2),
            (errors.ToleranceUnreachable("tol below precision"), 2),
            (errors.InternalInconsistency("mismatch"), 3),
            (errors.ConfigParseError("bad"), 1),
        ],
    )
    def test_exit_codes(self, exc, code):
        assert isinstance(exc, errors.DcqError)
        assert isinstance(exc, ValueError)
        assert exc.exit_code == code

    def test_index_overflow_names_horizon(self):
        exc = errors.IndexOverflow(2**62, 4)
        assert "4" in str(exc)


class TestMessages:
    def test_empty_branches(self):
        with pytest.raises(errors.EmptyBranches, match="branch"):
            validate_spec([])

    def test_ratio_out_of_range_keeps_ratio(self):
        with pytest.raises(errors.RatioOutOfRange) as excinfo:
            validate_spec([(2, "3/2")])
        assert excinfo.value.ratio == Fraction(3, 2)
        assert excinfo.value.index == 0

    def test_toll_too_short_reports_lengths(self, half_third_spec):
        with pytest.raises(errors.TollTooShort) as excinfo:
            evaluate_dense(half_third_spec, from_values([1.0, 2.0]), 9)
        assert "2" in str(excinfo.value)
        assert "9" in str(excinfo.value)

    def test_envelope_too_weak_reports_exponent(self, half_third_spec):
        s0 = solve_exponent(half_third_spec).s0
        with pytest.raises(errors.EnvelopeTooWeak) as excinfo:
            limit_estimate(half_third_spec, s0, constant(1), 10, envelope=Envelope(c=1.0, eta=1.0))
        assert excinfo.value.eta == 1.0
        assert excinfo.value.s0 == s0


class TestGracefulEdges:
    def test_sparse_index_zero_is_toll(self, half_third_spec):
        assert evaluate_sparse(half_third_spec, constant(7), 0) == 7.0

    def test_overflow_is_reported_not_wrapped(self):
        spec = validate_spec([(2, Fraction(2**62 - 1, 2**62))])
        with pytest.raises(errors.IndexOverflow):
            evaluate_dense(spec, constant(1), 4)
