"""
Domain Types for Binary Matrices, Partial Matrices and Margins

This module defines the immutable value objects every other module works with:
bit-packed binary matrices, partial matrices over {0,1,*}, margin vectors,
row/column index sets, South-East walks and good-form witnesses.

Rows are stored as Python ints used as bitsets (bit j is column j). Indices are
0-based here and 1-based in every text/JSON surface.
"""

from fractions import Fraction
from typing import Iterable, Iterator, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from defining_sets.errors import (
    DimensionMismatchError,
    InvalidPermutationError,
    MarginRangeError,
    TotalMismatchError,
)

Side = Literal["row", "column"]


def full_mask(width: int) -> int:
    """Get the bitmask with the lowest ``width`` bits set."""
    return (1 << width) - 1


def permute_bits(mask: int, order: Sequence[int]) -> int:
    """Reorder the bits of ``mask`` so new bit q holds old bit ``order[q]``."""
    out = 0
    for q, j in enumerate(order):
        if (mask >> j) & 1:
            out |= 1 << q
    return out


def check_permutation(order: Sequence[int], size: int) -> None:
    """Raise unless ``order`` is a permutation of ``range(size)``."""
    if len(order) != size or sorted(order) != list(range(size)):
        raise InvalidPermutationError(f"{list(order)} is not a permutation of 0..{size - 1}")


# ===== MATRICES =====

class BinaryMatrix(BaseModel):
    """Dense m×n 0/1 matrix, one bit-packed int per row."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1, description="Number of rows")
    n: int = Field(ge=1, description="Number of columns")
    rows: tuple[int, ...] = Field(description="Row bitsets; bit j of rows[i] is cell (i, j)")

    @model_validator(mode="after")
    def _check_shape(self) -> "BinaryMatrix":
        if len(self.rows) != self.m:
            raise DimensionMismatchError(f"expected {self.m} rows, got {len(self.rows)}")
        limit = 1 << self.n
        if any(r < 0 or r >= limit for r in self.rows):
            raise DimensionMismatchError(f"row bitset wider than n={self.n}")
        return self

    @classmethod
    def from_lists(cls, cells: Sequence[Sequence[int]]) -> "BinaryMatrix":
        """Build a matrix from nested lists of 0/1 values."""
        if not cells or not cells[0]:
            raise DimensionMismatchError("matrix must have at least one row and column")
        n = len(cells[0])
        rows = []
        for row in cells:
            if len(row) != n:
                raise DimensionMismatchError("ragged rows")
            rows.append(sum(1 << j for j, v in enumerate(row) if v))
        return cls(m=len(cells), n=n, rows=tuple(rows))

    @classmethod
    def zeros(cls, m: int, n: int) -> "BinaryMatrix":
        return cls(m=m, n=n, rows=(0,) * m)

    @classmethod
    def ones(cls, m: int, n: int) -> "BinaryMatrix":
        return cls(m=m, n=n, rows=(full_mask(n),) * m)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(m=n, n=n, rows=tuple(1 << i for i in range(n)))

    def cell(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.n)] for r in self.rows]

    @property
    def total_ones(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    @property
    def total_zeros(self) -> int:
        return self.m * self.n - self.total_ones

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "BinaryMatrix":
        """Rearrange so new row p is old row ``row_perm[p]`` and new column q is old ``col_perm[q]``."""
        check_permutation(row_perm, self.m)
        check_permutation(col_perm, self.n)
        return BinaryMatrix(
            m=self.m,
            n=self.n,
            rows=tuple(permute_bits(self.rows[i], col_perm) for i in row_perm),
        )


class PartialMatrix(BaseModel):
    """m×n matrix over {0, 1, *}.

    ``known`` marks filled cells, ``values`` holds their bits; values outside
    ``known`` must be zero.
    """

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1, description="Number of rows")
    n: int = Field(ge=1, description="Number of columns")
    known: tuple[int, ...] = Field(description="Per-row bitmask of filled cells")
    values: tuple[int, ...] = Field(description="Per-row bitmask of filled cells equal to 1")

    @model_validator(mode="after")
    def _check_masks(self) -> "PartialMatrix":
        if len(self.known) != self.m or len(self.values) != self.m:
            raise DimensionMismatchError(f"expected {self.m} rows of masks")
        limit = 1 << self.n
        for k, v in zip(self.known, self.values):
            if k < 0 or k >= limit or v & ~k:
                raise DimensionMismatchError("values must lie within known cells and n columns")
        return self

    @classmethod
    def empty(cls, m: int, n: int) -> "PartialMatrix":
        return cls(m=m, n=n, known=(0,) * m, values=(0,) * m)

    @classmethod
    def from_matrix(cls, matrix: BinaryMatrix) -> "PartialMatrix":
        """Reveal every cell of ``matrix``."""
        mask = full_mask(matrix.n)
        return cls(m=matrix.m, n=matrix.n, known=(mask,) * matrix.m, values=matrix.rows)

    @classmethod
    def from_cells(
        cls, m: int, n: int, cells: Iterable[tuple[int, int, int]]
    ) -> "PartialMatrix":
        """Build from (row, column, value) triples, 0-based."""
        known = [0] * m
        values = [0] * m
        for i, j, v in cells:
            known[i] |= 1 << j
            if v:
                values[i] |= 1 << j
        return cls(m=m, n=n, known=tuple(known), values=tuple(values))

    @property
    def size(self) -> int:
        """Number of filled cells |D|."""
        return sum(k.bit_count() for k in self.known)

    def get(self, i: int, j: int) -> Optional[int]:
        if not (self.known[i] >> j) & 1:
            return None
        return (self.values[i] >> j) & 1

    def ones_mask(self, i: int) -> int:
        return self.values[i]

    def zeros_mask(self, i: int) -> int:
        return self.known[i] & ~self.values[i]

    def cells(self) -> Iterator[tuple[int, int, int]]:
        """Yield filled cells as (row, column, value) in row-major order."""
        for i in range(self.m):
            k = self.known[i]
            for j in range(self.n):
                if (k >> j) & 1:
                    yield i, j, (self.values[i] >> j) & 1

    def is_complete(self) -> bool:
        mask = full_mask(self.n)
        return all(k == mask for k in self.known)

    def is_subset_of(self, matrix: BinaryMatrix) -> bool:
        """Check D ⊆ M: every filled cell agrees with ``matrix``."""
        self._check_same_shape(matrix)
        return all(
            (v ^ r) & k == 0 for k, v, r in zip(self.known, self.values, matrix.rows)
        )

    def difference(self, matrix: BinaryMatrix) -> "PartialMatrix":
        """Build M∖D: reveal exactly the cells of ``matrix`` that are empty here."""
        self._check_same_shape(matrix)
        mask = full_mask(self.n)
        known = tuple(mask & ~k for k in self.known)
        values = tuple(r & nk for r, nk in zip(matrix.rows, known))
        return PartialMatrix(m=self.m, n=self.n, known=known, values=values)

    def without_cell(self, i: int, j: int) -> "PartialMatrix":
        bit = ~(1 << j)
        known = list(self.known)
        values = list(self.values)
        known[i] &= bit
        values[i] &= bit
        return PartialMatrix(m=self.m, n=self.n, known=tuple(known), values=tuple(values))

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "PartialMatrix":
        """Rearrange so new row p is old row ``row_perm[p]`` and new column q is old ``col_perm[q]``."""
        check_permutation(row_perm, self.m)
        check_permutation(col_perm, self.n)
        return PartialMatrix(
            m=self.m,
            n=self.n,
            known=tuple(permute_bits(self.known[i], col_perm) for i in row_perm),
            values=tuple(permute_bits(self.values[i], col_perm) for i in row_perm),
        )

    def transposed(self) -> "PartialMatrix":
        known = [0] * self.n
        values = [0] * self.n
        for i, j, v in self.cells():
            known[j] |= 1 << i
            if v:
                values[j] |= 1 << i
        return PartialMatrix(m=self.n, n=self.m, known=tuple(known), values=tuple(values))

    def _check_same_shape(self, matrix: BinaryMatrix) -> None:
        if (self.m, self.n) != (matrix.m, matrix.n):
            raise DimensionMismatchError(
                f"partial matrix is {self.m}x{self.n}, matrix is {matrix.m}x{matrix.n}"
            )


# ===== MARGINS =====

class MarginSpec(BaseModel):
    """Row sums s and column sums t of a class A(s,t)."""

    model_config = ConfigDict(frozen=True)

    s: tuple[int, ...] = Field(min_length=1, description="Row sums")
    t: tuple[int, ...] = Field(min_length=1, description="Column sums")

    @model_validator(mode="after")
    def _check_non_negative(self) -> "MarginSpec":
        if any(v < 0 for v in self.s) or any(v < 0 for v in self.t):
            raise MarginRangeError("margins must be non-negative")
        return self

    @classmethod
    def regular(cls, n: int, k: int) -> "MarginSpec":
        """Margins of Λ^k_n: n×n with every row and column summing to k."""
        return cls(s=(k,) * n, t=(k,) * n)

    @classmethod
    def from_json(cls, data: dict) -> "MarginSpec":
        return cls(s=tuple(data["s"]), t=tuple(data["t"]))

    def to_json(self) -> dict:
        return {"s": list(self.s), "t": list(self.t)}

    @property
    def m(self) -> int:
        return len(self.s)

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def total(self) -> int:
        """E = Σ s_i."""
        return sum(self.s)

    @property
    def density(self) -> Fraction:
        """Exact density λ = E / (mn)."""
        return Fraction(self.total, self.m * self.n)

    def check_structure(self) -> None:
        """Raise unless totals agree and every sum fits its line."""
        if sum(self.s) != sum(self.t):
            raise TotalMismatchError(f"row total {sum(self.s)} != column total {sum(self.t)}")
        if any(v > self.n for v in self.s):
            raise MarginRangeError(f"a row sum exceeds n={self.n}")
        if any(v > self.m for v in self.t):
            raise MarginRangeError(f"a column sum exceeds m={self.m}")

    def transposed(self) -> "MarginSpec":
        return MarginSpec(s=self.t, t=self.s)

    def complemented(self) -> "MarginSpec":
        return MarginSpec(s=tuple(self.n - v for v in self.s), t=tuple(self.m - v for v in self.t))


# ===== INDEX SETS =====

class IndexSet(BaseModel):
    """A subset of the rows or of the columns, as a bitmask."""

    model_config = ConfigDict(frozen=True)

    side: Side = Field(description="Which side of the matrix the members index")
    size: int = Field(ge=0, description="Number of rows (or columns) on that side")
    members: int = Field(default=0, ge=0, description="Bitmask of members")

    @model_validator(mode="after")
    def _check_range(self) -> "IndexSet":
        if self.members >> self.size:
            raise DimensionMismatchError(f"members outside 0..{self.size - 1}")
        return self

    @classmethod
    def of_rows(cls, size: int, indices: Iterable[int] = ()) -> "IndexSet":
        return cls(side="row", size=size, members=sum(1 << i for i in set(indices)))

    @classmethod
    def of_columns(cls, size: int, indices: Iterable[int] = ()) -> "IndexSet":
        return cls(side="column", size=size, members=sum(1 << j for j in set(indices)))

    @classmethod
    def full(cls, side: Side, size: int) -> "IndexSet":
        return cls(side=side, size=size, members=full_mask(size))

    @property
    def cardinality(self) -> int:
        return self.members.bit_count()

    def indices(self) -> list[int]:
        return [i for i in range(self.size) if (self.members >> i) & 1]


# ===== WALKS AND WITNESSES =====

class Walk(BaseModel):
    """South-East walk as the threshold vector f(0..m).

    Row i (1-based) has its first f(i) cells below/left of the walk.
    """

    model_config = ConfigDict(frozen=True)

    f: tuple[int, ...] = Field(min_length=1, description="Weakly increasing thresholds, f[0] = 0")

    @model_validator(mode="after")
    def _check_monotone(self) -> "Walk":
        if self.f[0] != 0:
            raise ValueError("walk must start with f(0) = 0")
        if any(a > b for a, b in zip(self.f, self.f[1:])):
            raise ValueError("walk thresholds must be weakly increasing")
        return self

    @property
    def m(self) -> int:
        return len(self.f) - 1

    def below_mask(self, i: int) -> int:
        return full_mask(self.f[i + 1])


class GoodFormWitness(BaseModel):
    """Row order, column order and walk putting a partial matrix in good form."""

    model_config = ConfigDict(frozen=True)

    row_perm: tuple[int, ...] = Field(description="New row p is original row row_perm[p]")
    col_perm: tuple[int, ...] = Field(description="New column q is original column col_perm[q]")
    walk: Walk = Field(description="Walk valid for the rearranged matrix")

    @model_validator(mode="after")
    def _check_witness(self) -> "GoodFormWitness":
        check_permutation(self.row_perm, len(self.row_perm))
        check_permutation(self.col_perm, len(self.col_perm))
        if self.walk.m != len(self.row_perm):
            raise DimensionMismatchError("walk length does not match row count")
        if self.walk.f[-1] > len(self.col_perm):
            raise DimensionMismatchError("walk exceeds column count")
        return self

    def to_json(self) -> dict:
        return {
            "rows": [i + 1 for i in self.row_perm],
            "cols": [j + 1 for j in self.col_perm],
            "f": list(self.walk.f),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GoodFormWitness":
        return cls(
            row_perm=tuple(i - 1 for i in data["rows"]),
            col_perm=tuple(j - 1 for j in data["cols"]),
            walk=Walk(f=tuple(data["f"])),
        )
