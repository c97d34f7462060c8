import logging

import pytest
from hypothesis import given, settings
from strategies import binary_matrices, matrix_with_subset

from defining_sets.core import circulant_member, complement, transpose
from defining_sets.defining import (
    count_completions,
    critical_complement_is_defining,
    defining_set_from_witness,
    is_critical,
    is_defining,
    maxsds_exact,
    min_cost_for_column_order,
    minimalize_to_critical,
    sds,
    sds_bruteforce,
    sds_exact,
    sds_local_search,
    trivial_defining_bound,
    walk_split_counts,
)
from defining_sets.errors import (
    CapExceededError,
    EmptyClassError,
    InconsistentPartialError,
    InvalidPermutationError,
    NotDefiningError,
)
from defining_sets.goodform import witness_is_sound
from defining_sets.state_matrix import BinaryMatrix, MarginSpec, PartialMatrix, Walk

PAIR = MarginSpec(s=(1, 1), t=(1, 1))


class TestCompletions:
    def test_empty_partial(self):
        assert count_completions(PartialMatrix.empty(2, 2), PAIR) == 2

    def test_forced_completion(self):
        assert count_completions(PartialMatrix.from_cells(2, 2, [(0, 0, 1)]), PAIR) == 1

    def test_inconsistent_partial(self):
        with pytest.raises(InconsistentPartialError):
            count_completions(PartialMatrix.from_cells(2, 2, [(0, 0, 1), (0, 1, 1)]), PAIR)

    def test_cap_stops_early(self):
        assert count_completions(PartialMatrix.empty(4, 4), MarginSpec.regular(4, 2), cap=5) == 5


class TestIsDefining:
    def test_single_one_defines_identity(self, identity2):
        d = PartialMatrix.from_cells(2, 2, [(0, 0, 1)])
        assert is_defining(d, identity2)
        assert is_defining(d, identity2, method="oracle")

    def test_empty_set_does_not_define_identity(self, identity2):
        assert not is_defining(PartialMatrix.empty(2, 2), identity2)

    def test_disagreeing_cell(self, identity2):
        assert not is_defining(PartialMatrix.from_cells(2, 2, [(0, 0, 0)]), identity2)

    @given(binary_matrices(4, 4))
    def test_whole_matrix_is_defining(self, matrix):
        assert is_defining(PartialMatrix.from_matrix(matrix), matrix)

    @settings(max_examples=300, deadline=None)
    @given(matrix_with_subset(3, 3))
    def test_goodform_agrees_with_oracle(self, pair):
        d, matrix = pair
        assert is_defining(d, matrix) == is_defining(d, matrix, method="oracle")


class TestWalkCost:
    def test_identity(self, identity2):
        cost, witness = min_cost_for_column_order(identity2, [0, 1])
        assert cost == 1
        assert witness.walk == Walk(f=(0, 1, 2))
        assert witness.row_perm == (0, 1)
        assert defining_set_from_witness(identity2, witness) == PartialMatrix.from_cells(2, 2, [(1, 0, 0)])

    @pytest.mark.parametrize("matrix", [BinaryMatrix.zeros(3, 4), BinaryMatrix.ones(3, 4)])
    def test_constant_matrices_cost_nothing(self, matrix):
        cost, _ = min_cost_for_column_order(matrix, range(4))
        assert cost == 0

    def test_rejects_bad_order(self, identity2):
        with pytest.raises(InvalidPermutationError):
            min_cost_for_column_order(identity2, [0, 0])

    @settings(max_examples=100, deadline=None)
    @given(binary_matrices(4, 4))
    def test_split_counts_match_cost(self, matrix):
        cost, witness = min_cost_for_column_order(matrix, range(matrix.n))
        counts = walk_split_counts(matrix, witness)
        assert counts.defining_cost == cost
        assert counts.alpha0 + counts.alpha1 + counts.beta0 + counts.beta1 == matrix.m * matrix.n
        d = defining_set_from_witness(matrix, witness)
        assert d.size == cost
        assert witness_is_sound(d.difference(matrix), witness)
        assert is_defining(d, matrix)


class TestSds:
    def test_identity2(self, identity2):
        assert sds_exact(identity2).value == 1

    def test_identity3(self, identity3):
        result = sds_exact(identity3)
        assert result.value == 2
        assert result.exact
        assert is_defining(result.witness_d, identity3, method="oracle")

    def test_one_member_class(self):
        assert sds_exact(BinaryMatrix.ones(3, 3)).value == 0
        assert sds_exact(BinaryMatrix.ones(1, 1)).value == 0

    def test_trivial_bound(self, identity2):
        assert trivial_defining_bound(identity2) == 2
        assert trivial_defining_bound(BinaryMatrix.ones(3, 3)) == 0

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_lambda_family_within_trivial_bound(self, k):
        matrix = circulant_member(2 * k, k)
        assert sds_exact(matrix).value <= 2 * k * k

    @settings(max_examples=60, deadline=None)
    @given(binary_matrices(3, 3))
    def test_matches_bruteforce(self, matrix):
        assert sds_exact(matrix).value == sds_bruteforce(matrix).size

    @settings(max_examples=60, deadline=None)
    @given(binary_matrices(3, 5))
    def test_witness_reproduces_value(self, matrix):
        result = sds_exact(matrix)
        assert defining_set_from_witness(matrix, result.witness) == result.witness_d
        assert walk_split_counts(matrix, result.witness).defining_cost == result.value
        assert is_defining(result.witness_d, matrix)

    @settings(max_examples=60, deadline=None)
    @given(binary_matrices(4, 4))
    def test_symmetries(self, matrix):
        value = sds_exact(matrix).value
        assert sds_exact(transpose(matrix)).value == value
        assert sds_exact(complement(matrix)).value == value
        assert value <= trivial_defining_bound(matrix)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            sds_exact(BinaryMatrix.identity(5), cap_factorial=100)

    def test_workers_do_not_change_result(self):
        matrix = circulant_member(5, 2)
        assert sds_exact(matrix, workers=2) == sds_exact(matrix)

    @settings(max_examples=40, deadline=None)
    @given(binary_matrices(4, 4))
    def test_local_search_is_upper_bound(self, matrix):
        result = sds_local_search(matrix, restarts=5, seed=3)
        assert not result.exact
        assert result.value >= sds_exact(matrix).value
        assert is_defining(result.witness_d, matrix)

    def test_fallback_is_logged(self, identity3, caplog):
        with caplog.at_level(logging.WARNING, logger="defining_sets"):
            result = sds(identity3, cap_factorial=1)
        assert not result.exact
        assert result.value >= 2
        assert "[SOLVER] FALLBACK" in caplog.text


class TestCritical:
    def test_minimalize_full_identity(self, identity2):
        critical = minimalize_to_critical(PartialMatrix.from_matrix(identity2), identity2)
        assert critical == PartialMatrix.from_cells(2, 2, [(1, 1, 1)])
        assert is_critical(critical, identity2)

    def test_critical_set_is_fixed_point(self, identity2):
        d = PartialMatrix.from_cells(2, 2, [(0, 0, 1)])
        assert is_critical(d, identity2)
        assert minimalize_to_critical(d, identity2) == d

    def test_not_defining(self, identity2):
        with pytest.raises(NotDefiningError):
            minimalize_to_critical(PartialMatrix.empty(2, 2), identity2)

    def test_full_matrix_is_not_critical(self, identity2):
        assert not is_critical(PartialMatrix.from_matrix(identity2), identity2)

    def test_empty_set_on_one_member_class(self):
        assert is_critical(PartialMatrix.empty(2, 2), BinaryMatrix.ones(2, 2))

    def test_complement_of_critical_set(self, identity2):
        d = PartialMatrix.from_cells(2, 2, [(1, 1, 1)])
        assert critical_complement_is_defining(d, identity2)

    def test_custom_order(self, identity3):
        order = [(2, 2), (1, 1), (0, 0)] + [(i, j) for i in range(3) for j in range(3) if i != j]
        critical = minimalize_to_critical(PartialMatrix.from_matrix(identity3), identity3, order=order)
        assert is_critical(critical, identity3)
        assert is_critical(critical, identity3, method="oracle")

    @settings(max_examples=40, deadline=None)
    @given(binary_matrices(3, 4))
    def test_critical_sets_complements_define(self, matrix):
        critical = minimalize_to_critical(PartialMatrix.from_matrix(matrix), matrix)
        assert is_critical(critical, matrix)
        assert critical_complement_is_defining(critical, matrix)


class TestMaxSds:
    def test_pair_class(self):
        assert maxsds_exact(PAIR) == 1

    def test_one_member_class(self):
        assert maxsds_exact(MarginSpec.regular(2, 2)) == 0

    def test_empty_class(self):
        with pytest.raises(EmptyClassError):
            maxsds_exact(MarginSpec(s=(2, 0), t=(2, 0)))

    def test_class_cap(self):
        with pytest.raises(CapExceededError):
            maxsds_exact(MarginSpec.regular(4, 2), class_cap=10)
