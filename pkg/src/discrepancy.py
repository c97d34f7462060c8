"""Subarray discrepancy, the concentration threshold and the walk-block certificate.

All discrepancies are exact integers scaled by mn:
scaled(R, C) = mn·ones(M[R,C]) − E·|R|·|C|.

For a fixed row set R the extremal column set is forced: the columns with
positive surplus mn·ones_j(R) − E·|R| give the maximum and those with negative
surplus the minimum. The exact scan therefore enumerates subsets of the
smaller side only.
"""

import logging
import math
from fractions import Fraction
from typing import Literal

import numpy as np

from defining_sets.config import MAX_EXACT_DISCREPANCY_SIDE
from defining_sets.core import ones_in_subarray, transpose
from defining_sets.errors import DomainError, ProblemTooLargeError
from defining_sets.parallel import make_rng
from defining_sets.state_analysis import CertificateInput, DiscrepancyValue, MaxDiscrepancyResult
from defining_sets.state_matrix import BinaryMatrix, IndexSet

logger = logging.getLogger(__name__)

Mode = Literal["exact", "sampled"]

# Row subsets evaluated per numpy batch in the exact scan
SCAN_CHUNK = 1 << 14


def delta_scaled(matrix: BinaryMatrix, rows: IndexSet, cols: IndexSet) -> DiscrepancyValue:
    """Exact mn·δ(M[R,C]) with λ taken from the margins of ``matrix``.

    Raises:
        SideMismatchError: If the index sets are on the wrong side or of the wrong size
    """
    cells = matrix.m * matrix.n
    ones = ones_in_subarray(matrix, rows, cols)
    scaled = cells * ones - matrix.total_ones * rows.cardinality * cols.cardinality
    return DiscrepancyValue(scaled=scaled, denominator=cells)


# ===== MAXIMUM =====

def _scan_rows(matrix: BinaryMatrix) -> tuple[int, int, int]:
    """Best (scaled, row mask, column mask) over row subsets, earliest mask on ties."""
    m, n = matrix.m, matrix.n
    cells, total = m * n, matrix.total_ones
    bits = np.array([[(r >> j) & 1 for j in range(n)] for r in matrix.rows], dtype=np.int64)
    shifts = np.arange(m, dtype=np.int64)
    best_abs, best = 0, (0, 0, 0)

    for lo in range(0, 1 << m, SCAN_CHUNK):
        masks = np.arange(lo, min(lo + SCAN_CHUNK, 1 << m), dtype=np.int64)
        chosen = (masks[:, None] >> shifts) & 1
        surplus = cells * (chosen @ bits) - total * chosen.sum(axis=1)[:, None]
        positive = np.where(surplus > 0, surplus, 0).sum(axis=1)
        negative = np.where(surplus < 0, surplus, 0).sum(axis=1)
        strength = np.maximum(positive, -negative)
        k = int(np.argmax(strength))
        if int(strength[k]) <= best_abs:
            continue
        best_abs = int(strength[k])
        row_mask = int(masks[k])
        if positive[k] >= -negative[k]:
            col_mask = sum(1 << j for j in range(n) if surplus[k, j] > 0)
            best = (int(positive[k]), row_mask, col_mask)
        else:
            col_mask = sum(1 << j for j in range(n) if surplus[k, j] < 0)
            best = (int(negative[k]), row_mask, col_mask)
    return best


def _result(matrix: BinaryMatrix, scaled: int, row_mask: int, col_mask: int, exact: bool):
    return MaxDiscrepancyResult(
        value=DiscrepancyValue(scaled=scaled, denominator=matrix.m * matrix.n),
        rows=IndexSet(side="row", size=matrix.m, members=row_mask),
        cols=IndexSet(side="column", size=matrix.n, members=col_mask),
        exact=exact,
    )


def max_discrepancy(
    matrix: BinaryMatrix, mode: Mode = "exact", trials: int = 1000, seed: int = 0
) -> MaxDiscrepancyResult:
    """Largest |δ(M[R,C])| over subarrays.

    Args:
        matrix: The matrix M
        mode: ``"exact"`` scans every subset of the smaller side; ``"sampled"``
            evaluates ``trials`` random (R, C) pairs and returns a lower bound
        trials: Pairs drawn in sampled mode
        seed: Seed of the sampled mode

    Returns:
        The signed discrepancy of the best subarray with its row and column sets

    Raises:
        ProblemTooLargeError: In exact mode when the smaller side exceeds the scan limit
    """
    if mode == "sampled":
        return _sampled(matrix, trials, seed)
    if min(matrix.m, matrix.n) > MAX_EXACT_DISCREPANCY_SIDE:
        raise ProblemTooLargeError(
            f"exact scan needs min(m, n) <= {MAX_EXACT_DISCREPANCY_SIDE}, got {matrix.m}x{matrix.n}"
        )
    if matrix.m <= matrix.n:
        scaled, row_mask, col_mask = _scan_rows(matrix)
    else:
        scaled, col_mask, row_mask = _scan_rows(transpose(matrix))
    return _result(matrix, scaled, row_mask, col_mask, exact=True)


def _mask(bits: list[int]) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def _sampled(matrix: BinaryMatrix, trials: int, seed: int) -> MaxDiscrepancyResult:
    rng = make_rng(seed)
    row_draws = [_mask(bits) for bits in rng.integers(0, 2, size=(trials, matrix.m)).tolist()]
    col_draws = [_mask(bits) for bits in rng.integers(0, 2, size=(trials, matrix.n)).tolist()]
    best = (0, 0, 0)
    for row_mask, col_mask in zip(row_draws, col_draws):
        value = delta_scaled(
            matrix,
            IndexSet(side="row", size=matrix.m, members=int(row_mask)),
            IndexSet(side="column", size=matrix.n, members=int(col_mask)),
        ).scaled
        if abs(value) > abs(best[0]):
            best = (value, int(row_mask), int(col_mask))
    return _result(matrix, *best, exact=False)


def max_discrepancy_bruteforce(matrix: BinaryMatrix) -> MaxDiscrepancyResult:
    """Largest |δ| over all 2^m·2^n subset pairs, earliest (R, C) on ties."""
    cells, total = matrix.m * matrix.n, matrix.total_ones
    best = (0, 0, 0)
    for row_mask in range(1 << matrix.m):
        picked = [r for i, r in enumerate(matrix.rows) if (row_mask >> i) & 1]
        for col_mask in range(1 << matrix.n):
            ones = sum((r & col_mask).bit_count() for r in picked)
            value = cells * ones - total * len(picked) * col_mask.bit_count()
            if abs(value) > abs(best[0]):
                best = (value, row_mask, col_mask)
    return _result(matrix, *best, exact=True)


# ===== THRESHOLDS AND CERTIFICATES =====

def concentration_threshold(m: int, n: int, c: float, eps: float) -> float:
    """c·(m·n^{1/2+ε} + n·m^{1/2+ε}).

    Raises:
        DomainError: If c ≤ 0 or ε < 0
    """
    if c <= 0 or eps < 0:
        raise DomainError(f"need c > 0 and eps >= 0, got c={c}, eps={eps}")
    return c * (m * n ** (0.5 + eps) + n * m ** (0.5 + eps))


def walk_block_certificate(inp: CertificateInput) -> int:
    """Lower bound on the size of every defining set from a uniform discrepancy bound Δ.

    Cells of a row that lie below the walk but outside its block number at most
    h per row, so at most n·h overall, and each of the ⌈m^{1/4}⌉ blocks deviates
    by at most Δ. Hence |β₁ − λ(β₁+β₀)| ≤ K with K = n·h + ⌈m^{1/4}⌉·Δ. As
    (1−λ)/λ ≥ 1 for λ ≤ 1/2, β₀ ≥ β₁ − K/λ and |D| = α₁ + β₀ ≥ λmn − K/λ.

    Returns:
        max(0, ⌈λmn − (n·h + ⌈m^{1/4}⌉·Δ)/λ⌉)

    Raises:
        DomainError: Unless 0 < λ ≤ 1/2
    """
    lam = inp.density
    if not 0 < lam <= Fraction(1, 2):
        raise DomainError(f"density {lam} outside (0, 1/2]")
    slack = inp.n * inp.h + inp.blocks * inp.delta
    return max(0, math.ceil(lam * inp.m * inp.n - slack / lam))


def certificate_for(matrix: BinaryMatrix, max_abs_scaled: int) -> int:
    """Walk-block certificate for ``matrix`` with Δ = ⌈max|δ|⌉.

    Densities above 1/2 use the complement, whose defining sets have the same
    sizes and whose discrepancies are negated.
    """
    cells = matrix.m * matrix.n
    total = matrix.total_ones
    if total in (0, cells):
        return 0
    if 2 * total > cells:
        total = cells - total
    delta = -(-max_abs_scaled // cells)
    return walk_block_certificate(
        CertificateInput(
            m=matrix.m,
            n=matrix.n,
            density_num=total,
            density_den=cells,
            delta_scaled=delta * cells,
        )
    )
