"""Defining sets, smallest defining sets and critical sets.

A partial matrix D ⊆ M is a defining set for M when M is the only member of
A(margins_of(M)) containing D. Two independent routes decide this: the
good-form route (M∖D can be permuted into good form) and the oracle route
(counting completions up to 2).

For a fixed column order the best row order is forced: every row picks the
threshold minimising its own cost and rows are sorted by threshold. The
exact solver therefore searches column orders only, on whichever side has
the smaller factorial.
"""

import itertools
import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np

from defining_sets.config import CAP_CLASS, CAP_FACTORIAL, RNG_ALGORITHM
from defining_sets.core import margins_of, transpose
from defining_sets.counting import class_size, enumerate_class
from defining_sets.errors import (
    CapExceededError,
    DimensionMismatchError,
    EmptyClassError,
    InconsistentPartialError,
    NotDefiningError,
)
from defining_sets.goodform import permutable_to_good_form
from defining_sets.parallel import make_rng, ordered_map
from defining_sets.run_logger import log_solver_fallback
from defining_sets.state_analysis import SdsResult, WalkSplitCounts
from defining_sets.state_matrix import (
    BinaryMatrix,
    GoodFormWitness,
    MarginSpec,
    PartialMatrix,
    Walk,
    check_permutation,
    full_mask,
)

logger = logging.getLogger(__name__)

Method = Literal["goodform", "oracle"]


# ===== COMPLETIONS =====

def count_completions(
    partial: PartialMatrix, margins: MarginSpec, cap: Optional[int] = None
) -> int:
    """Count members of A(s,t) containing ``partial``.

    Rows are filled in order. Column residuals never exceed the free cells left
    in their column, so every surviving branch completes; columns whose residual
    equals their remaining free cells are forced.

    Args:
        partial: Filled cells to respect
        margins: Row and column sums
        cap: Stop and return ``cap`` once this many completions are found

    Returns:
        The number of completions, at most ``cap``

    Raises:
        InconsistentPartialError: If ``partial`` already breaks a margin
    """
    if cap is not None and cap < 1:
        raise ValueError("cap must be at least 1")
    if (partial.m, partial.n) != (margins.m, margins.n):
        raise DimensionMismatchError("partial matrix and margins disagree on shape")
    margins.check_structure()
    m, n = partial.m, partial.n

    need_row = []
    for i in range(m):
        ones = partial.ones_mask(i).bit_count()
        zeros = partial.zeros_mask(i).bit_count()
        if ones > margins.s[i] or zeros > n - margins.s[i]:
            raise InconsistentPartialError(f"row {i + 1} cannot reach sum {margins.s[i]}")
        need_row.append(margins.s[i] - ones)

    col_need = []
    for j in range(n):
        ones = sum((partial.ones_mask(i) >> j) & 1 for i in range(m))
        zeros = sum((partial.zeros_mask(i) >> j) & 1 for i in range(m))
        if ones > margins.t[j] or zeros > m - margins.t[j]:
            raise InconsistentPartialError(f"column {j + 1} cannot reach sum {margins.t[j]}")
        col_need.append(margins.t[j] - ones)

    mask = full_mask(n)
    free = [mask & ~k for k in partial.known]
    # free cells of column j in rows i..m-1
    free_below = [[0] * n for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        for j in range(n):
            free_below[i][j] = free_below[i + 1][j] + ((free[i] >> j) & 1)

    memo: dict[tuple, int] = {}

    def completions(i: int, need: tuple[int, ...]) -> int:
        if i == m:
            return 1
        if cap is None and (i, need) in memo:
            return memo[(i, need)]
        forced = []
        optional = []
        for j in range(n):
            if not (free[i] >> j) & 1 or need[j] == 0:
                continue
            if need[j] == free_below[i][j]:
                forced.append(j)
            else:
                optional.append(j)
        extra = need_row[i] - len(forced)
        total = 0
        if 0 <= extra <= len(optional):
            for picked in itertools.combinations(optional, extra):
                nxt = list(need)
                for j in forced:
                    nxt[j] -= 1
                for j in picked:
                    nxt[j] -= 1
                total += completions(i + 1, tuple(nxt))
                if cap is not None and total >= cap:
                    return total
        if cap is None:
            memo[(i, need)] = total
        return total

    total = completions(0, tuple(col_need))
    return total if cap is None else min(total, cap)


def is_defining(d: PartialMatrix, matrix: BinaryMatrix, method: Method = "goodform") -> bool:
    """Decide whether ``d`` is a defining set for ``matrix``.

    Raises:
        DimensionMismatchError: If the shapes differ
    """
    if not d.is_subset_of(matrix):
        return False
    if method == "goodform":
        return permutable_to_good_form(d.difference(matrix)) is not None
    return count_completions(d, margins_of(matrix), cap=2) == 1


# ===== WALK COSTS =====

def min_cost_for_column_order(
    matrix: BinaryMatrix, col_order: Sequence[int]
) -> tuple[int, GoodFormWitness]:
    """Cheapest defining set whose complement is in good form under ``col_order``.

    Each row takes the largest threshold f minimising (zeros among its first f
    ordered columns) + (ones among the rest); rows are then sorted by threshold.

    Returns:
        The cost α₁ + β₀ and the witness arrangement realising it

    Raises:
        InvalidPermutationError: If ``col_order`` is not a permutation of the columns
    """
    check_permutation(col_order, matrix.n)
    thresholds = []
    cost = 0
    for r in matrix.rows:
        bits = [(r >> c) & 1 for c in col_order]
        ones_left = sum(bits)
        zeros_seen = 0
        best, best_f = ones_left, 0
        for f, b in enumerate(bits, start=1):
            if b:
                ones_left -= 1
            else:
                zeros_seen += 1
            if zeros_seen + ones_left <= best:
                best, best_f = zeros_seen + ones_left, f
        thresholds.append(best_f)
        cost += best
    row_perm = sorted(range(matrix.m), key=lambda i: (thresholds[i], i))
    walk = Walk(f=(0,) + tuple(thresholds[i] for i in row_perm))
    return cost, GoodFormWitness(row_perm=tuple(row_perm), col_perm=tuple(col_order), walk=walk)


def walk_split_counts(matrix: BinaryMatrix, witness: GoodFormWitness) -> WalkSplitCounts:
    """Count zeros and ones of ``matrix`` above and below the witness walk."""
    arranged = matrix.permuted(witness.row_perm, witness.col_perm)
    alpha0 = alpha1 = beta0 = beta1 = 0
    for i, r in enumerate(arranged.rows):
        below = witness.walk.below_mask(i)
        width = witness.walk.f[i + 1]
        ones_below = (r & below).bit_count()
        ones_above = r.bit_count() - ones_below
        beta1 += ones_below
        beta0 += width - ones_below
        alpha1 += ones_above
        alpha0 += matrix.n - width - ones_above
    return WalkSplitCounts(alpha0=alpha0, alpha1=alpha1, beta0=beta0, beta1=beta1)


def defining_set_from_witness(matrix: BinaryMatrix, witness: GoodFormWitness) -> PartialMatrix:
    """Reveal the ones above and the zeros below the witness walk, in original coordinates."""
    arranged = matrix.permuted(witness.row_perm, witness.col_perm)
    cells = []
    for p, r in enumerate(arranged.rows):
        width = witness.walk.f[p + 1]
        for q in range(matrix.n):
            bit = (r >> q) & 1
            if (q < width) != bool(bit):
                cells.append((witness.row_perm[p], witness.col_perm[q], bit))
    return PartialMatrix.from_cells(matrix.m, matrix.n, cells)


def trivial_defining_bound(matrix: BinaryMatrix) -> int:
    """Size of the smaller of the all-ones and all-zeros defining sets."""
    return min(matrix.total_ones, matrix.total_zeros)


# ===== EXACT SEARCH =====

def _column_signatures(rows: Sequence[int], m: int, n: int) -> list[int]:
    return [sum(((rows[i] >> c) & 1) << i for i in range(m)) for c in range(n)]


def _search_column_orders(
    rows: tuple[int, ...], m: int, n: int, first: Optional[int] = None
) -> tuple[float, Optional[tuple[int, ...]]]:
    """Branch and bound over column orders.

    Per row the state is (zeros so far, ones so far, best prefix score). With
    the remaining columns free to reorder, a row costs at least
    min(best exact cost over thresholds inside the prefix, zeros in the prefix).
    Returns the lexicographically first optimal order.
    """
    sig = _column_signatures(rows, m, n)
    bits = np.array([[(rows[i] >> c) & 1 for i in range(m)] for c in range(n)], dtype=np.int64)
    ones_total = np.array([r.bit_count() for r in rows], dtype=np.int64)
    used = [False] * n
    order: list[int] = []
    best_cost: float = math.inf
    best_order: Optional[tuple[int, ...]] = None

    def candidates() -> list[int]:
        out = []
        for c in range(n):
            if used[c]:
                continue
            # identical columns are interchangeable; take the smallest unused one
            if any(not used[c2] and sig[c2] == sig[c] for c2 in range(c)):
                continue
            out.append(c)
        return out

    def descend(zeros: np.ndarray, ones: np.ndarray, prefix_best: np.ndarray) -> None:
        nonlocal best_cost, best_order
        bound = int(np.minimum(prefix_best + ones_total, zeros).sum())
        if bound >= best_cost:
            return
        if len(order) == n:
            best_cost, best_order = bound, tuple(order)
            return
        choices = candidates()
        if not order and first is not None:
            choices = [first]
        for c in choices:
            col = bits[c]
            nz = zeros + (1 - col)
            no = ones + col
            used[c] = True
            order.append(c)
            descend(nz, no, np.minimum(prefix_best, nz - no))
            order.pop()
            used[c] = False

    start = np.zeros(m, dtype=np.int64)
    descend(start, start.copy(), start.copy())
    return best_cost, best_order


def _solve_subtree(task: tuple[tuple[int, ...], int, int, int]) -> tuple[float, Optional[tuple[int, ...]]]:
    rows, m, n, first = task
    return _search_column_orders(rows, m, n, first)


def _first_columns(matrix: BinaryMatrix) -> list[int]:
    sig = _column_signatures(matrix.rows, matrix.m, matrix.n)
    return [c for c in range(matrix.n) if sig[c] not in sig[:c]]


def _transpose_witness(witness: GoodFormWitness, m: int, n: int) -> GoodFormWitness:
    """Map a witness for Mᵀ (n×m) to one for M (m×n) with the same cell partition.

    Transposing swaps the roles of the two conditions, so both orders are
    reversed; row a of the new arrangement keeps #{p : f'(p) ≥ m + 1 - a} cells
    below the walk.
    """
    f_t = witness.walk.f
    row_perm = tuple(reversed(witness.col_perm))
    col_perm = tuple(reversed(witness.row_perm))
    g = [0] + [sum(1 for p in range(1, n + 1) if f_t[p] >= m + 1 - a) for a in range(1, m + 1)]
    return GoodFormWitness(row_perm=row_perm, col_perm=col_perm, walk=Walk(f=tuple(g)))


def sds_exact(
    matrix: BinaryMatrix, cap_factorial: int = CAP_FACTORIAL, workers: int = 1
) -> SdsResult:
    """Compute sds(M) exactly with a witness.

    Args:
        matrix: The matrix M
        cap_factorial: Largest min(m!, n!) to enumerate
        workers: Processes for first-column subtrees; the result does not depend on it

    Raises:
        CapExceededError: When min(m!, n!) exceeds ``cap_factorial``
    """
    m, n = matrix.m, matrix.n
    if math.factorial(n) > math.factorial(m):
        flipped = sds_exact(transpose(matrix), cap_factorial, workers)
        witness = _transpose_witness(flipped.witness, m, n)
        return SdsResult(
            value=flipped.value,
            witness_d=flipped.witness_d.transposed(),
            witness=witness,
            exact=True,
        )
    if math.factorial(n) > cap_factorial:
        raise CapExceededError(f"{n}! column orders exceed cap {cap_factorial}")

    if workers > 1:
        tasks = [(matrix.rows, m, n, c) for c in _first_columns(matrix)]
        results = ordered_map(_solve_subtree, tasks, workers)
        cost, order = min(
            ((c, o) for c, o in results if o is not None), key=lambda pair: (pair[0], pair[1])
        )
    else:
        cost, order = _search_column_orders(matrix.rows, m, n)

    value, witness = min_cost_for_column_order(matrix, order)
    logger.debug("sds_exact %dx%d -> %d via column order %s", m, n, value, order)
    return SdsResult(
        value=value,
        witness_d=defining_set_from_witness(matrix, witness),
        witness=witness,
        exact=True,
    )


def sds_local_search(matrix: BinaryMatrix, restarts: int = 50, seed: int = 0) -> SdsResult:
    """Upper bound on sds(M) by steepest descent over adjacent column swaps.

    The first restart starts from the identity order, the rest from seeded
    random orders.
    """
    rng = make_rng(seed)
    best: Optional[tuple[int, tuple[int, ...]]] = None
    for attempt in range(restarts):
        order = list(range(matrix.n)) if attempt == 0 else [int(c) for c in rng.permutation(matrix.n)]
        cost, _ = min_cost_for_column_order(matrix, order)
        while True:
            step = None
            for q in range(matrix.n - 1):
                trial = order[:]
                trial[q], trial[q + 1] = trial[q + 1], trial[q]
                trial_cost, _ = min_cost_for_column_order(matrix, trial)
                if trial_cost < cost and (step is None or trial_cost < step[0]):
                    step = (trial_cost, trial)
            if step is None:
                break
            cost, order = step
        if best is None or (cost, tuple(order)) < best:
            best = (cost, tuple(order))
    assert best is not None
    value, witness = min_cost_for_column_order(matrix, best[1])
    return SdsResult(
        value=value,
        witness_d=defining_set_from_witness(matrix, witness),
        witness=witness,
        exact=False,
    )


def sds(
    matrix: BinaryMatrix,
    cap_factorial: int = CAP_FACTORIAL,
    seed: int = 0,
    workers: int = 1,
) -> SdsResult:
    """Exact sds when within the cap, otherwise a flagged local-search upper bound."""
    try:
        return sds_exact(matrix, cap_factorial, workers)
    except CapExceededError as e:
        log_solver_fallback(matrix.m, matrix.n, str(e), RNG_ALGORITHM, seed)
        return sds_local_search(matrix, seed=seed)


def sds_bruteforce(matrix: BinaryMatrix) -> PartialMatrix:
    """Smallest defining set by trying every subset of cells, smallest first.

    Uses the completion-count oracle only, so it is independent of the
    good-form machinery.
    """
    cells = [(i, j, matrix.cell(i, j)) for i in range(matrix.m) for j in range(matrix.n)]
    for size in range(len(cells) + 1):
        for chosen in itertools.combinations(cells, size):
            d = PartialMatrix.from_cells(matrix.m, matrix.n, chosen)
            if is_defining(d, matrix, method="oracle"):
                return d
    raise AssertionError("the full matrix is always defining")


# ===== CRITICAL SETS =====

def minimalize_to_critical(
    d: PartialMatrix,
    matrix: BinaryMatrix,
    order: Optional[Sequence[tuple[int, int]]] = None,
    method: Method = "goodform",
) -> PartialMatrix:
    """Drop cells of ``d`` one at a time, in ``order``, while it stays defining.

    One pass suffices: a cell that cannot be removed now cannot be removed from
    any smaller defining set either.

    Args:
        d: A defining set for ``matrix``
        matrix: The matrix M
        order: Cells (row, column) to try, 0-based; defaults to row-major
        method: Defining-set test to use

    Raises:
        NotDefiningError: If ``d`` is not a defining set
    """
    if not is_defining(d, matrix, method):
        raise NotDefiningError("cannot minimalize a set that is not defining")
    if order is None:
        order = [(i, j) for i, j, _ in d.cells()]
    current = d
    for i, j in order:
        if current.get(i, j) is None:
            continue
        candidate = current.without_cell(i, j)
        if is_defining(candidate, matrix, method):
            current = candidate
    return current


def is_critical(d: PartialMatrix, matrix: BinaryMatrix, method: Method = "goodform") -> bool:
    """Whether ``d`` is defining and no single filled cell can be removed."""
    if not is_defining(d, matrix, method):
        return False
    return not any(is_defining(d.without_cell(i, j), matrix, method) for i, j, _ in d.cells())


def critical_complement_is_defining(d: PartialMatrix, matrix: BinaryMatrix) -> bool:
    """Whether M∖D is itself a defining set for M."""
    return is_defining(d.difference(matrix), matrix)


# ===== CLASS LEVEL =====

def maxsds_exact(
    margins: MarginSpec, class_cap: int = CAP_CLASS, cap_factorial: int = CAP_FACTORIAL
) -> int:
    """Largest sds over every member of A(s,t).

    Raises:
        EmptyClassError: If the class is empty
        CapExceededError: If the class has more than ``class_cap`` members
    """
    size = class_size(margins)
    if size == 0:
        raise EmptyClassError(f"no matrix has margins {margins.to_json()}")
    if size > class_cap:
        raise CapExceededError(f"class has {size} members, cap is {class_cap}")
    return max(sds_exact(member, cap_factorial).value for member in enumerate_class(margins))
