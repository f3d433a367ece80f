import math

import numpy as np
import pytest

from app.core.exceptions import CapacityError, DomainError
from app.services.assignment.core import (
    LOG_ZERO,
    CostMatrix,
    brute_force_distribution,
    conditional_direct,
    enumerate_valid_maps,
    is_positive_one_to_one,
    joint_log_weight,
    random_cost_matrix,
    total_variation,
)
from app.services.assignment.io import format_cost_matrix, parse_cost_matrix


class TestPositiveOneToOne:
    def test_zeros_repeatable(self):
        assert is_positive_one_to_one((0, 0, 0))

    def test_duplicated_positive(self):
        assert not is_positive_one_to_one((1, 1))

    def test_distinct_positives(self):
        assert is_positive_one_to_one((2, -1, 1))

    def test_out_of_range_raises(self):
        with pytest.raises(DomainError):
            is_positive_one_to_one((0, -2))
        with pytest.raises(DomainError):
            is_positive_one_to_one((3, 0), M=2)


class TestJointLogWeight:
    def test_direct_product(self, eta_2x3):
        assert joint_log_weight((1, -1), eta_2x3) == pytest.approx(math.log(2.0))

    def test_invalid_map_is_log_zero(self, eta_2x3):
        assert joint_log_weight((1, 1), eta_2x3) == LOG_ZERO
        assert joint_log_weight((2, 0), eta_2x3) == LOG_ZERO

    def test_length_mismatch(self, eta_2x3):
        with pytest.raises(DomainError):
            joint_log_weight((0, 0, 0), eta_2x3)

    def test_total_mass_is_fourteen(self, eta_2x3):
        maps = list(enumerate_valid_maps(2, 1))
        total = sum(math.exp(joint_log_weight(g, eta_2x3)) for g in maps)
        assert total == pytest.approx(14.0)
        assert math.exp(joint_log_weight((1, -1), eta_2x3)) / total == pytest.approx(2 / 14)


class TestEnumeration:
    def test_single_label_no_measurements(self):
        assert list(enumerate_valid_maps(1, 0)) == [(-1,), (0,)]

    @pytest.mark.parametrize("P,M,count", [(2, 1, 8), (2, 2, 14), (3, 2, 44)])
    def test_counts(self, P, M, count):
        maps = list(enumerate_valid_maps(P, M))
        assert len(maps) == count
        assert len(set(maps)) == count
        assert all(is_positive_one_to_one(g, M) for g in maps)

    def test_lexicographic_order(self):
        maps = list(enumerate_valid_maps(2, 2))
        assert maps == sorted(maps)
        assert maps[0] == (-1, -1)

    def test_guard_raises_eagerly(self):
        with pytest.raises(CapacityError):
            enumerate_valid_maps(10, 10)
        with pytest.raises(CapacityError):
            enumerate_valid_maps(3, 2, limit=10)


class TestBruteForce:
    def test_two_outcomes(self):
        dist = brute_force_distribution(CostMatrix.from_rows([[3.0, 1.0]]))
        assert dist[(-1,)] == pytest.approx(0.75)
        assert dist[(0,)] == pytest.approx(0.25)

    def test_reference_instance(self, eta_2x3):
        dist = brute_force_distribution(eta_2x3)
        assert dist[(0, 1)] == pytest.approx(3 / 14, abs=1e-12)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)

    def test_all_ones_uniform(self):
        dist = brute_force_distribution(CostMatrix(np.ones((2, 3))))
        assert len(dist) == 8
        assert all(p == pytest.approx(1 / 8) for p in dist.values())

    def test_matches_joint_weights(self, rng):
        eta = random_cost_matrix(3, 3, rng)
        dist = brute_force_distribution(eta)
        maps = list(enumerate_valid_maps(3, 3))
        total = sum(math.exp(joint_log_weight(g, eta)) for g in maps)
        for g in maps:
            assert dist[g] == pytest.approx(math.exp(joint_log_weight(g, eta)) / total, abs=1e-12)

    def test_row_rescaling_invariance(self, rng):
        eta = random_cost_matrix(3, 2, rng)
        base = brute_force_distribution(eta)
        scaled = brute_force_distribution(eta.row_scaled(1, 7.5))
        assert total_variation(base, scaled) < 1e-12


class TestConditionalDirect:
    def test_masks_held_index(self, eta_2x3):
        np.testing.assert_allclose(conditional_direct(0, (0, 1), eta_2x3), [0.5, 0.5, 0.0])

    def test_no_measurements(self):
        eta = CostMatrix.from_rows([[2.0, 6.0], [1.0, 1.0]])
        np.testing.assert_allclose(conditional_direct(0, (-1, 0), eta), [0.25, 0.75])

    def test_single_coordinate_is_row(self):
        eta = CostMatrix.from_rows([[1.0, 2.0, 3.0, 4.0]])
        np.testing.assert_allclose(conditional_direct(0, (2,), eta), np.array([1, 2, 3, 4]) / 10)

    def test_zero_exactly_on_held_indices(self, rng):
        eta = random_cost_matrix(4, 5, rng)
        gamma = (3, 0, 5, -1)
        p = conditional_direct(1, gamma, eta)
        assert p[3 + 1] == 0.0 and p[5 + 1] == 0.0
        held = {4, 6}
        assert all(p[c] > 0 for c in range(eta.M + 2) if c not in held)
        for c in np.flatnonzero(p):
            candidate = list(gamma)
            candidate[1] = int(c) - 1
            assert is_positive_one_to_one(candidate)

    def test_invalid_rest_raises(self):
        eta = CostMatrix(np.ones((3, 3)))
        with pytest.raises(DomainError):
            conditional_direct(0, (0, 1, 1), eta)


class TestCostMatrix:
    @pytest.mark.parametrize("rows", [[[1.0, 0.0]], [[1.0, -1.0, 2.0]], [[1.0, float("inf")]], [[1.0]]])
    def test_rejects_invalid(self, rows):
        with pytest.raises(DomainError):
            CostMatrix.from_rows(rows)

    def test_read_only(self, eta_2x3):
        with pytest.raises(ValueError):
            eta_2x3.values[0, 0] = 5.0

    def test_text_format(self, eta_2x3):
        text = format_cost_matrix(eta_2x3)
        assert text.splitlines()[0] == "2 1"
        parsed = parse_cost_matrix("# reference\n" + text)
        np.testing.assert_array_equal(parsed.values, eta_2x3.values)

    def test_text_format_shape_errors(self):
        with pytest.raises(DomainError):
            parse_cost_matrix("2 1\n1 1 2\n")
        with pytest.raises(DomainError):
            parse_cost_matrix("1 1\n1 1\n")


def test_total_variation_disjoint():
    assert total_variation({(0,): 1.0}, {(1,): 1.0}) == pytest.approx(1.0)
