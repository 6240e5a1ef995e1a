"""
Tests for recurrence specifications, evaluators and kernel columns.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from dcq.errors import (
    DcqError,
    EmptyBranches,
    IndexOverflow,
    InexactRatio,
    NegativeWeight,
    RatioOutOfRange,
    SubcriticalWeightSum,
    TollTooShort,
)
from dcq.recurrence import (
    evaluate_dense,
    evaluate_exact,
    evaluate_sparse,
    floor_index,
    geometric_checkpoints,
    kernel_column,
    validate_spec,
)
from dcq.tolls import constant, from_function, from_values, impulse, prefix


def random_specs(count: int, seed: int):
    """Random valid specs with exact weights and small-denominator ratios."""
    rng = np.random.default_rng(seed)
    specs = []
    while len(specs) < count:
        m = int(rng.integers(1, 4))
        branches = []
        for _ in range(m):
            v = int(rng.integers(2, 10))
            u = int(rng.integers(1, v))
            branches.append((Fraction(int(rng.integers(1, 9)), 4), Fraction(u, v)))
        if sum(b for b, _ in branches) > 1:
            specs.append(validate_spec(branches))
    return specs


class TestValidateSpec:
    """Hypothesis checks on the branch list."""

    def test_accepts_fraction_and_string_ratios(self):
        spec = validate_spec([(1, Fraction(1, 2)), (1, "1/3")])
        assert spec.m == 2
        assert spec.ratios_at_most_half
        assert spec.weight_sum == 2
        assert spec.to_dict() == [{"b": 1, "p": "1/2"}, {"b": 1, "p": "1/3"}]

    def test_decimal_string_ratio_is_exact(self):
        spec = validate_spec([(3, "0.25")])
        assert spec.branches[0].ratio == Fraction(1, 4)

    def test_float_weight_keeps_decimal(self):
        spec = validate_spec([(0.6, "1/2"), (0.6, "1/3")])
        assert spec.branches[0].weight == Fraction(3, 5)

    def test_empty_branches(self):
        with pytest.raises(EmptyBranches):
            validate_spec([])

    @pytest.mark.parametrize("p", ["0", "1", "3/2", "-1/2", 1, 0])
    def test_ratio_out_of_range(self, p):
        with pytest.raises(RatioOutOfRange):
            validate_spec([(2, p)])

    def test_ratio_range_reports_branch_index(self):
        with pytest.raises(RatioOutOfRange) as excinfo:
            validate_spec([(1, "1/2"), (1, "5/4")])
        assert excinfo.value.index == 1

    def test_negative_weight(self):
        with pytest.raises(NegativeWeight, match="Branch 1"):
            validate_spec([(3, "1/2"), (-1, "1/3")])

    @pytest.mark.parametrize("branches", [[(0.5, "1/2")], [(Fraction(1, 2), "1/2"), (Fraction(1, 2), "1/3")]])
    def test_subcritical_weight_sum(self, branches):
        with pytest.raises(SubcriticalWeightSum):
            validate_spec(branches)

    def test_float_ratio_is_rejected(self):
        with pytest.raises(InexactRatio, match="exact rational"):
            validate_spec([(2, 0.5)])

    def test_unreadable_ratio(self):
        with pytest.raises(DcqError, match="cannot read ratio"):
            validate_spec([(2, "half")])

    def test_duplicate_branches_are_kept(self):
        spec = validate_spec([(1, "1/2"), (1, "1/2")])
        assert spec.m == 2

    def test_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            validate_spec([])


class TestFloorIndex:
    @pytest.mark.parametrize(
        "p,n,expected",
        [
            (Fraction(1, 2), 7, 3),
            (Fraction(1, 3), 3, 1),
            (Fraction(2, 3), 3, 2),
            (Fraction(7, 10), 10, 7),
            (Fraction(1, 3), 0, 0),
        ],
    )
    def test_small_values(self, p, n, expected):
        assert floor_index(p, n) == expected

    def test_large_index_is_exact(self):
        n = 10**30 + 1
        assert floor_index(Fraction(1, 3), n) == n // 3

    def test_negative_index(self):
        with pytest.raises(DcqError):
            floor_index(Fraction(1, 2), -1)


class TestEvaluateDense:
    def test_impulse_at_zero(self, half_third_spec):
        traj = evaluate_dense(half_third_spec, impulse(0), 6)
        assert traj.values.tolist() == [1, 2, 3, 4, 5, 5, 7]

    def test_constant_one(self, half_third_spec):
        traj = evaluate_dense(half_third_spec, constant(1), 4)
        assert traj.values.tolist() == [1, 3, 5, 7, 9]

    def test_horizon_zero(self, half_third_spec):
        traj = evaluate_dense(half_third_spec, constant(5), 0)
        assert traj.values.tolist() == [5]

    def test_values_are_read_only(self, half_third_spec):
        traj = evaluate_dense(half_third_spec, constant(1), 10)
        assert not traj.values.flags.writeable

    def test_ratios(self, half_third_spec):
        traj = evaluate_dense(half_third_spec, impulse(0), 6)
        ratios = traj.ratios(1.0, [1, 2, 6])
        assert ratios.tolist() == pytest.approx([2.0, 1.5, 7 / 6])

    def test_prefix_toll(self, half_third_spec):
        traj = evaluate_dense(half_third_spec, prefix(1), 3)
        # a = (1, 1, 0, 0)
        assert traj.values.tolist() == [1, 3, 4, 6]

    def test_matches_exact_oracle(self, half_third_spec):
        horizon = 200
        dense = evaluate_dense(half_third_spec, constant(1), horizon).values
        exact = evaluate_exact(half_third_spec, constant(1), horizon)
        assert [Fraction(float(v)) for v in dense] == exact

    def test_non_dyadic_weights_match_sparse_bit_for_bit(self):
        spec = validate_spec([(Fraction(7, 10), "2/3"), (Fraction(9, 10), "1/5")])
        toll = from_function(lambda n: 1.0 / (n + 1), name="harmonic")
        traj = evaluate_dense(spec, toll, 5000)
        for n in (1, 2, 17, 999, 4096, 5000):
            assert evaluate_sparse(spec, toll, n) == traj.values[n]

    def test_stored_toll_too_short(self, half_third_spec):
        with pytest.raises(TollTooShort):
            evaluate_dense(half_third_spec, from_values([1, 2, 3]), 5)

    def test_negative_horizon(self, half_third_spec):
        with pytest.raises(DcqError, match="Horizon"):
            evaluate_dense(half_third_spec, constant(1), -1)

    def test_index_overflow(self):
        near_one = Fraction(2**62 - 1, 2**62)
        spec = validate_spec([(2, near_one)])
        with pytest.raises(IndexOverflow):
            evaluate_dense(spec, constant(1), 4)


class TestEvaluateSparse:
    @pytest.mark.parametrize("n", [0, 1, 6, 1000, 123457])
    def test_agrees_with_dense(self, half_third_spec, n):
        traj = evaluate_dense(half_third_spec, constant(1), 123457)
        assert evaluate_sparse(half_third_spec, constant(1), n) == traj.values[n]

    def test_huge_index(self, half_third_spec):
        # reachable set from 10^18 is small: indices floor(n / (2^i 3^k))
        value = evaluate_sparse(half_third_spec, impulse(0), 10**18)
        assert value > 0

    def test_negative_index(self, half_third_spec):
        with pytest.raises(DcqError):
            evaluate_sparse(half_third_spec, constant(1), -3)

    def test_random_specs_and_tolls_bit_for_bit(self):
        rng = np.random.default_rng(21)
        horizon = 10**5
        for spec in random_specs(20, seed=22):
            toll = from_values(rng.normal(0.0, 10.0, horizon + 1))
            traj = evaluate_dense(spec, toll, horizon)
            for n in rng.integers(0, horizon + 1, 30):
                assert evaluate_sparse(spec, toll, int(n)) == traj.values[n]


class TestPrefixResponse:
    @pytest.mark.parametrize("n0", [0, 1, 4, 25, 300])
    def test_non_decreasing_up_to_prefix_end(self, n0):
        for spec in random_specs(20, seed=31):
            x = evaluate_dense(spec, prefix(n0), n0).values
            assert np.all(np.diff(x) >= 0)

    def test_drop_after_prefix_end(self, half_third_spec):
        x = evaluate_exact(half_third_spec, prefix(4), 40)
        assert x[:6] == [1, 3, 5, 7, 9, 8]
        assert evaluate_dense(half_third_spec, prefix(4), 40).values.tolist() == [float(v) for v in x]

    def test_constant_toll_is_non_decreasing(self):
        for spec in random_specs(20, seed=32):
            x = evaluate_dense(spec, constant(1), 10**4).values
            assert np.all(np.diff(x) >= 0)


class TestKernelColumn:
    def test_first_impulse_column(self, half_third_spec):
        col = kernel_column(half_third_spec, 1, 3)
        assert col.values.tolist() == [0, 1, 1, 2]

    def test_equals_impulse_trajectory(self, half_third_spec):
        col = kernel_column(half_third_spec, 5, 2000)
        traj = evaluate_dense(half_third_spec, impulse(5), 2000)
        assert np.array_equal(col.values, traj.values)

    def test_index_beyond_horizon_is_zero(self, half_third_spec):
        col = kernel_column(half_third_spec, 10, 4)
        assert col.values.tolist() == [0, 0, 0, 0, 0]

    @pytest.mark.slow
    def test_kernel_identity_exact(self):
        """X_n = sum_{j<=n} K^j_n a_j with zero error in rational arithmetic."""
        rng = np.random.default_rng(7)
        horizon = 200
        for spec in random_specs(50, seed=11):
            a = [Fraction(int(v), int(d)) for v, d in zip(rng.integers(-5, 6, horizon + 1), rng.integers(1, 5, horizon + 1))]
            x = evaluate_exact(spec, from_values(a), horizon)
            kernels = [evaluate_exact(spec, impulse(j), horizon) for j in range(horizon + 1)]
            for n in range(horizon + 1):
                assert x[n] == sum((kernels[j][n] * a[j] for j in range(n + 1)), Fraction(0))

    def test_kernel_identity_small_horizon(self):
        rng = np.random.default_rng(8)
        horizon = 40
        for spec in random_specs(10, seed=12):
            a = [Fraction(int(v), 3) for v in rng.integers(-6, 7, horizon + 1)]
            x = evaluate_exact(spec, from_values(a), horizon)
            kernels = [evaluate_exact(spec, impulse(j), horizon) for j in range(horizon + 1)]
            assert x[horizon] == sum((kernels[j][horizon] * a[j] for j in range(horizon + 1)), Fraction(0))

    @pytest.mark.slow
    def test_kernel_identity_floating_point(self):
        rng = np.random.default_rng(9)
        horizon = 10**4
        for spec in random_specs(3, seed=13):
            a = rng.uniform(0.5, 1.5, horizon + 1)
            x = evaluate_dense(spec, from_values(a), horizon).values
            acc = np.zeros(horizon + 1)
            for j in range(horizon + 1):
                acc += a[j] * kernel_column(spec, j, horizon).values
            np.testing.assert_allclose(acc, x, rtol=1e-9)

    def test_superposition_floating_point(self):
        """L(a + lam a') = L(a) + lam L(a')."""
        rng = np.random.default_rng(10)
        horizon = 5000
        for spec in random_specs(10, seed=14):
            a = rng.uniform(0.0, 2.0, horizon + 1)
            a_prime = rng.uniform(0.0, 2.0, horizon + 1)
            lam = float(rng.uniform(0.1, 3.0))
            combined = evaluate_dense(spec, from_values(a + lam * a_prime), horizon).values
            x = evaluate_dense(spec, from_values(a), horizon).values
            x_prime = evaluate_dense(spec, from_values(a_prime), horizon).values
            np.testing.assert_allclose(combined, x + lam * x_prime, rtol=1e-10)

    def test_impulse_at_zero_is_positive(self):
        for spec in random_specs(20, seed=15):
            assert np.all(kernel_column(spec, 0, 10**4).values > 0)

    def test_non_negative_toll_gives_non_negative_trajectory(self):
        rng = np.random.default_rng(16)
        for spec in random_specs(20, seed=17):
            a = rng.uniform(0.0, 1.0, 2001) * (rng.random(2001) < 0.3)
            assert np.all(evaluate_dense(spec, from_values(a), 2000).values >= 0)

    def test_kernel_bound(self):
        """0 <= K^j_n <= K^0_n / K^0_j for j <= n."""
        horizon = 10**4
        for spec in random_specs(10, seed=3):
            k0 = kernel_column(spec, 0, horizon).values
            for j in range(0, horizon + 1, 499):
                kj = kernel_column(spec, j, horizon).values[j:]
                bound = k0[j:] / k0[j]
                assert np.all(kj >= 0)
                assert np.all(kj <= bound * (1 + 1e-12))


class TestNegativeControl:
    def test_single_branch_unrolls_to_power_of_two(self, binary_spec):
        traj = evaluate_dense(binary_spec, impulse(0), 1000)
        for n in (1, 2, 3, 7, 8, 500, 1000):
            assert traj.values[n] == 2 ** (n.bit_length())

    def test_single_branch_ratio_oscillates(self, binary_spec):
        traj = evaluate_dense(binary_spec, impulse(0), 10**6)
        n = np.arange(10**5, 10**6 + 1)
        ratios = traj.values[n] / n
        assert ratios.max() - ratios.min() >= 0.5
        assert ratios.min() >= 1.0
        assert ratios.max() <= 2.0


class TestCheckpoints:
    def test_powers_of_two(self):
        points = geometric_checkpoints(100)
        assert points == [1, 2, 4, 8, 16, 32, 64, 100]

    def test_strictly_increasing_with_small_factor(self):
        points = geometric_checkpoints(10**6, 1.1)
        assert points[0] == 1
        assert points[-1] == 10**6
        assert all(b > a for a, b in zip(points, points[1:]))

    def test_horizon_one(self):
        assert geometric_checkpoints(1) == [1]

    @pytest.mark.parametrize("factor", [1.0, 0.5, float("inf")])
    def test_invalid_factor(self, factor):
        with pytest.raises(DcqError, match="factor"):
            geometric_checkpoints(10, factor)


class TestEvaluateExact:
    def test_rational_weights(self):
        spec = validate_spec([(Fraction(3, 4), "1/2"), (Fraction(3, 4), "1/2")])
        xs = evaluate_exact(spec, impulse(0), 2)
        assert xs == [Fraction(1), Fraction(3, 2), Fraction(9, 4)]

    def test_function_toll_has_no_exact_values(self, half_third_spec):
        with pytest.raises(DcqError, match="exact"):
            evaluate_exact(half_third_spec, from_function(lambda n: 1.0), 3)
