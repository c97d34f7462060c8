"""Core operations on binary and partial matrices.

Text format (LF line endings, no trailing whitespace)::

    m n
    <m lines of n characters from {0, 1, *}>

A text without ``*`` parses as a :class:`BinaryMatrix`, otherwise as a
:class:`PartialMatrix`. Serialisation emits no trailing newline; parsing
accepts one.
"""

from typing import Union

from defining_sets.errors import EmptyClassError, MatrixFormatError, SideMismatchError
from defining_sets.state_matrix import (
    BinaryMatrix,
    IndexSet,
    MarginSpec,
    PartialMatrix,
    full_mask,
)

AnyMatrix = Union[BinaryMatrix, PartialMatrix]


# ===== TEXT FORMAT =====

def parse_matrix(text: str) -> AnyMatrix:
    """Parse the matrix text format.

    Args:
        text: Header line ``"m n"`` followed by m rows of n characters

    Returns:
        A BinaryMatrix when no cell is ``*``, else a PartialMatrix

    Raises:
        MatrixFormatError: On empty input, a bad header, wrong dimensions or an illegal character
    """
    if not text or not text.strip():
        raise MatrixFormatError("empty input")
    if text.endswith("\n"):
        text = text[:-1]
    lines = text.split("\n")
    header = lines[0].split(" ")
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise MatrixFormatError(f"bad header line {lines[0]!r}, expected 'm n'")
    m, n = int(header[0]), int(header[1])
    if m < 1 or n < 1:
        raise MatrixFormatError("dimensions must be positive")
    body = lines[1:]
    if len(body) != m:
        raise MatrixFormatError(f"dimension mismatch: header says {m} rows, found {len(body)}")

    known = []
    values = []
    for line in body:
        if len(line) != n:
            raise MatrixFormatError(
                f"dimension mismatch: row {line!r} has {len(line)} cells, expected {n}"
            )
        k = v = 0
        for j, ch in enumerate(line):
            if ch == "1":
                k |= 1 << j
                v |= 1 << j
            elif ch == "0":
                k |= 1 << j
            elif ch != "*":
                raise MatrixFormatError(f"illegal character {ch!r}")
        known.append(k)
        values.append(v)

    mask = full_mask(n)
    if all(k == mask for k in known):
        return BinaryMatrix(m=m, n=n, rows=tuple(values))
    return PartialMatrix(m=m, n=n, known=tuple(known), values=tuple(values))


def serialize_matrix(matrix: AnyMatrix) -> str:
    """Serialise a binary or partial matrix to the text format."""
    lines = [f"{matrix.m} {matrix.n}"]
    if isinstance(matrix, BinaryMatrix):
        for r in matrix.rows:
            lines.append("".join("1" if (r >> j) & 1 else "0" for j in range(matrix.n)))
    else:
        for k, v in zip(matrix.known, matrix.values):
            lines.append(
                "".join(
                    ("1" if (v >> j) & 1 else "0") if (k >> j) & 1 else "*"
                    for j in range(matrix.n)
                )
            )
    return "\n".join(lines)


# ===== MARGINS =====

def margins_of(matrix: BinaryMatrix) -> MarginSpec:
    """Get the row and column sums of ``matrix``."""
    s = tuple(r.bit_count() for r in matrix.rows)
    t = tuple(sum((r >> j) & 1 for r in matrix.rows) for j in range(matrix.n))
    return MarginSpec(s=s, t=t)


def gale_ryser_feasible(margins: MarginSpec) -> bool:
    """Decide whether A(s,t) is nonempty.

    Sorted row sums must be dominated by the conjugate of the column sums:
    for every k, the k largest row sums total at most Σ_j min(t_j, k).

    Raises:
        TotalMismatchError: When Σs ≠ Σt
        MarginRangeError: When some s_i > n or t_j > m
    """
    margins.check_structure()
    s = sorted(margins.s, reverse=True)
    running = 0
    for k, value in enumerate(s, start=1):
        running += value
        if running > sum(min(tj, k) for tj in margins.t):
            return False
    return True


# ===== TRANSFORMS =====

def complement(matrix: BinaryMatrix) -> BinaryMatrix:
    """Flip every cell."""
    mask = full_mask(matrix.n)
    return BinaryMatrix(m=matrix.m, n=matrix.n, rows=tuple(r ^ mask for r in matrix.rows))


def transpose(matrix: BinaryMatrix) -> BinaryMatrix:
    cols = [0] * matrix.n
    for i, r in enumerate(matrix.rows):
        for j in range(matrix.n):
            if (r >> j) & 1:
                cols[j] |= 1 << i
    return BinaryMatrix(m=matrix.n, n=matrix.m, rows=tuple(cols))


def ones_in_subarray(matrix: BinaryMatrix, rows: IndexSet, cols: IndexSet) -> int:
    """Count the ones of M[R, C].

    Raises:
        SideMismatchError: If ``rows`` is not row-side or ``cols`` is not column-side
    """
    if rows.side != "row" or cols.side != "column":
        raise SideMismatchError("expected a row-side set and a column-side set")
    if rows.size != matrix.m or cols.size != matrix.n:
        raise SideMismatchError("index set sizes do not match the matrix")
    c = cols.members
    return sum(
        (r & c).bit_count() for i, r in enumerate(matrix.rows) if (rows.members >> i) & 1
    )


# ===== CONSTRUCTIONS =====

def construct_member(margins: MarginSpec) -> BinaryMatrix:
    """Build one member of A(s,t) greedily.

    Each row, in order, takes its ones in the columns with the largest
    residual sums (ties to the smaller index). This succeeds whenever the
    class is nonempty.

    Raises:
        EmptyClassError: If the margins are infeasible
    """
    if not gale_ryser_feasible(margins):
        raise EmptyClassError(f"no matrix has margins {margins.to_json()}")
    residual = list(margins.t)
    rows = []
    for si in margins.s:
        chosen = sorted(range(margins.n), key=lambda j: (-residual[j], j))[:si]
        row = 0
        for j in chosen:
            residual[j] -= 1
            row |= 1 << j
        rows.append(row)
    return BinaryMatrix(m=margins.m, n=margins.n, rows=tuple(rows))


def circulant_member(n: int, k: int) -> BinaryMatrix:
    """Member of Λ^k_n whose row i has ones in columns i, i+1, ..., i+k-1 (mod n)."""
    rows = []
    for i in range(n):
        row = 0
        for r in range(k):
            row |= 1 << ((i + r) % n)
        rows.append(row)
    return BinaryMatrix(m=n, n=n, rows=tuple(rows))
