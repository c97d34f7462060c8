import math

import pytest
from hypothesis import given, settings
from strategies import binary_matrices

from defining_sets.core import margins_of, serialize_matrix
from defining_sets.counting import (
    class_size,
    count_bruteforce,
    count_exact,
    degree_event_log_probability,
    enumerate_class,
    estimate_count_leading,
    leading_ratio_log,
    log_binomial,
    unrank,
)
from defining_sets.errors import (
    CapExceededError,
    DomainError,
    EmptyClassError,
    ProblemTooLargeError,
    TotalMismatchError,
)
from defining_sets.state_matrix import MarginSpec

PAIR = MarginSpec(s=(1, 1), t=(1, 1))
EMPTY_CLASS = MarginSpec(s=(2, 0), t=(2, 0))


class TestExactCount:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_permutation_matrices(self, n):
        assert count_exact(MarginSpec.regular(n, 1)) == math.factorial(n)

    @pytest.mark.parametrize(
        "k, expected", [(1, 2), (2, 90), (3, 297200), (4, 116963796250)]
    )
    def test_lambda_family(self, k, expected):
        assert class_size(MarginSpec.regular(2 * k, k)) == expected

    def test_matches_filter(self):
        margins = MarginSpec.regular(4, 2)
        assert count_bruteforce(margins) == class_size(margins) == 90

    def test_empty_class(self):
        assert class_size(EMPTY_CLASS) == 0

    def test_total_mismatch(self):
        with pytest.raises(TotalMismatchError):
            class_size(MarginSpec(s=(2, 2), t=(2, 1)))

    def test_filter_limit(self):
        with pytest.raises(ProblemTooLargeError):
            count_bruteforce(MarginSpec.regular(5, 2))

    def test_workers(self):
        margins = MarginSpec.regular(6, 3)
        assert count_exact(margins, workers=2) == 297200

    @settings(max_examples=25, deadline=None)
    @given(binary_matrices(4, 4))
    def test_matches_filter_on_random_margins(self, matrix):
        margins = margins_of(matrix)
        assert class_size(margins) == count_bruteforce(margins)

    @settings(max_examples=60, deadline=None)
    @given(binary_matrices(5, 5))
    def test_invariant_under_transpose_and_complement(self, matrix):
        margins = margins_of(matrix)
        size = class_size(margins)
        assert size >= 1
        assert class_size(margins.transposed()) == size
        assert class_size(margins.complemented()) == size


class TestEnumeration:
    def test_members_are_sorted_and_distinct(self):
        margins = MarginSpec(s=(2, 1, 1), t=(1, 2, 1))
        members = list(count_exact(margins, mode="enumerate"))
        texts = [serialize_matrix(m) for m in members]
        assert len(members) == class_size(margins)
        assert texts == sorted(set(texts))
        assert all(margins_of(m) == margins for m in members)

    def test_pair_class(self):
        texts = [serialize_matrix(m) for m in enumerate_class(PAIR)]
        assert texts == ["2 2\n01\n10", "2 2\n10\n01"]

    def test_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_class(MarginSpec.regular(4, 2), cap=89)

    def test_empty_class_yields_nothing(self):
        assert list(enumerate_class(EMPTY_CLASS)) == []

    def test_unrank_matches_enumeration(self):
        margins = MarginSpec.regular(4, 2)
        members = list(enumerate_class(margins))
        for index in (0, 1, 17, 45, 89):
            assert unrank(margins, index) == members[index]

    @pytest.mark.parametrize("index", [-1, 90])
    def test_unrank_out_of_range(self, index):
        with pytest.raises(DomainError):
            unrank(MarginSpec.regular(4, 2), index)


class TestEstimate:
    def test_pair_class(self):
        estimate = estimate_count_leading(PAIR)
        assert math.exp(estimate.log_value) == pytest.approx(16 / 6, rel=1e-10)
        assert not estimate.degenerate

    def test_permutations_of_three(self):
        estimate = estimate_count_leading(MarginSpec.regular(3, 1))
        assert math.exp(estimate.log_value) == pytest.approx(729 / 84, rel=1e-10)

    def test_components_sum(self):
        estimate = estimate_count_leading(MarginSpec.regular(4, 2))
        assert estimate.log_value == pytest.approx(
            estimate.log_inverse_global + estimate.log_row_product + estimate.log_column_product
        )
        assert estimate.entropy_log == pytest.approx(16 * math.log(2))

    @pytest.mark.parametrize("margins", [MarginSpec.regular(3, 3), MarginSpec.regular(2, 0)])
    def test_degenerate_class(self, margins):
        estimate = estimate_count_leading(margins)
        assert estimate.log_value == 0.0
        assert estimate.degenerate

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_ratio_to_exact(self, k):
        ratio = math.exp(leading_ratio_log(MarginSpec.regular(2 * k, k)))
        assert 0 < ratio <= 1.05

    def test_ratio_of_empty_class(self):
        with pytest.raises(EmptyClassError):
            leading_ratio_log(EMPTY_CLASS)

    def test_log_binomial(self):
        assert log_binomial(16, 8) == pytest.approx(math.log(12870))


class TestDegreeEvent:
    def test_exact(self):
        assert degree_event_log_probability(PAIR) == pytest.approx(math.log(2 / 6))

    def test_leading(self):
        assert degree_event_log_probability(PAIR, method="leading") == pytest.approx(
            math.log(16 / 6) - math.log(6)
        )

    def test_empty_class(self):
        assert degree_event_log_probability(EMPTY_CLASS) == -math.inf
