from fractions import Fraction

import pytest
from hypothesis import given, settings
from pydantic import ValidationError
from strategies import binary_matrices

from defining_sets.core import (
    circulant_member,
    complement,
    construct_member,
    gale_ryser_feasible,
    margins_of,
    ones_in_subarray,
    parse_matrix,
    serialize_matrix,
    transpose,
)
from defining_sets.counting import class_size
from defining_sets.errors import (
    DimensionMismatchError,
    EmptyClassError,
    MarginRangeError,
    MatrixFormatError,
    SideMismatchError,
    TotalMismatchError,
)
from defining_sets.state_matrix import BinaryMatrix, IndexSet, MarginSpec, PartialMatrix


class TestTextFormat:
    def test_parse_identity(self, identity2):
        assert parse_matrix("2 2\n10\n01") == identity2

    def test_trailing_newline_accepted(self, identity2):
        assert parse_matrix("2 2\n10\n01\n") == identity2

    def test_partial_cells(self):
        parsed = parse_matrix("2 2\n1*\n*0")
        assert isinstance(parsed, PartialMatrix)
        assert parsed.size == 2
        assert parsed.get(0, 0) == 1
        assert parsed.get(0, 1) is None
        assert parsed.get(1, 1) == 0

    def test_serialize_round_trips_text(self):
        text = "3 4\n1*01\n0000\n**11"
        assert serialize_matrix(parse_matrix(text)) == text

    def test_illegal_character(self):
        with pytest.raises(MatrixFormatError, match="illegal character 'x'"):
            parse_matrix("2 2\n1x\n01")

    @pytest.mark.parametrize(
        "text",
        ["", "   ", "2\n10\n01", "2 2\n10", "2 2\n10\n011", "a b\n1"],
    )
    def test_bad_input(self, text):
        with pytest.raises(MatrixFormatError):
            parse_matrix(text)


class TestMargins:
    def test_margins_of(self):
        matrix = BinaryMatrix.from_lists([[1, 1, 0], [1, 0, 1]])
        margins = margins_of(matrix)
        assert margins.s == (2, 2)
        assert margins.t == (2, 1, 1)
        assert margins.density == Fraction(2, 3)

    def test_gale_ryser(self):
        assert gale_ryser_feasible(MarginSpec(s=(2, 0), t=(1, 1)))
        assert not gale_ryser_feasible(MarginSpec(s=(2, 0), t=(2, 0)))

    def test_total_mismatch(self):
        with pytest.raises(TotalMismatchError):
            gale_ryser_feasible(MarginSpec(s=(2, 2), t=(2, 1)))

    def test_margin_out_of_range(self):
        with pytest.raises(MarginRangeError):
            gale_ryser_feasible(MarginSpec(s=(3, 0), t=(2, 1)))

    def test_feasibility_matches_counting(self):
        for m in range(1, 4):
            for n in range(1, 4):
                for s_code in range((n + 1) ** m):
                    s = tuple((s_code // (n + 1) ** i) % (n + 1) for i in range(m))
                    for t_code in range((m + 1) ** n):
                        t = tuple((t_code // (m + 1) ** j) % (m + 1) for j in range(n))
                        if sum(s) != sum(t):
                            continue
                        margins = MarginSpec(s=s, t=t)
                        assert gale_ryser_feasible(margins) == (class_size(margins) > 0)


class TestTransforms:
    def test_complement_of_identity(self, identity2):
        assert complement(identity2).to_lists() == [[0, 1], [1, 0]]

    def test_transpose_shape(self):
        matrix = BinaryMatrix.from_lists([[1, 0, 0], [1, 1, 0]])
        assert transpose(matrix).to_lists() == [[1, 1], [0, 1], [0, 0]]

    @given(binary_matrices(4, 4))
    def test_complement_is_involution(self, matrix):
        assert complement(complement(matrix)) == matrix
        assert margins_of(complement(matrix)) == margins_of(matrix).complemented()

    @given(binary_matrices(4, 4))
    def test_transpose_swaps_margins(self, matrix):
        assert transpose(transpose(matrix)) == matrix
        assert margins_of(transpose(matrix)) == margins_of(matrix).transposed()


class TestSubarrays:
    def test_ones_in_subarray(self, identity3):
        rows = IndexSet.of_rows(3, [0, 1])
        cols = IndexSet.of_columns(3, [1, 2])
        assert ones_in_subarray(identity3, rows, cols) == 1

    def test_wrong_side(self, identity2):
        cols = IndexSet.of_columns(2, [0])
        with pytest.raises(SideMismatchError):
            ones_in_subarray(identity2, cols, cols)

    def test_index_out_of_range(self):
        with pytest.raises(ValidationError):
            IndexSet.of_rows(2, [3])

    @settings(max_examples=50)
    @given(binary_matrices(4, 4))
    def test_additive_over_column_split(self, matrix):
        rows = IndexSet.full("row", matrix.m)
        left = IndexSet.of_columns(matrix.n, range(0, matrix.n, 2))
        right = IndexSet.of_columns(matrix.n, range(1, matrix.n, 2))
        total = ones_in_subarray(matrix, rows, IndexSet.full("column", matrix.n))
        assert ones_in_subarray(matrix, rows, left) + ones_in_subarray(matrix, rows, right) == total
        assert total == matrix.total_ones


class TestMembers:
    def test_ragged_lists(self):
        with pytest.raises(DimensionMismatchError):
            BinaryMatrix.from_lists([[1, 0], [1]])

    @given(binary_matrices(4, 5))
    def test_construct_member_hits_margins(self, matrix):
        margins = margins_of(matrix)
        assert margins_of(construct_member(margins)) == margins

    def test_construct_member_empty_class(self):
        with pytest.raises(EmptyClassError):
            construct_member(MarginSpec(s=(2, 0), t=(2, 0)))

    @pytest.mark.parametrize("n, k", [(4, 2), (6, 3), (5, 1), (3, 3)])
    def test_circulant_is_regular(self, n, k):
        assert margins_of(circulant_member(n, k)) == MarginSpec.regular(n, k)
