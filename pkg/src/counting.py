"""Exact class counts, enumeration, ranking and the leading-term estimate of |A(s,t)|.

Rows are filled top to bottom. Only the multiset of residual column sums
matters for the number of completions, so the counter groups columns by
residual and memoises on (row, residual histogram). Every prefix whose
residual margins fail the Gale–Ryser test is pruned.
"""

import logging
import math
from typing import Iterator, Literal, Optional, Sequence, Union

from defining_sets.config import CAP_CLASS
from defining_sets.core import gale_ryser_feasible
from defining_sets.errors import (
    CapExceededError,
    DomainError,
    EmptyClassError,
    ProblemTooLargeError,
)
from defining_sets.parallel import ordered_map
from defining_sets.state_analysis import CountEstimate
from defining_sets.state_matrix import BinaryMatrix, MarginSpec, full_mask

logger = logging.getLogger(__name__)

Mode = Literal["count", "enumerate"]

# 2^(mn) filter oracle refuses anything larger
MAX_BRUTEFORCE_CELLS = 20


# ===== RESIDUAL FEASIBILITY =====

def _histogram(residual: Sequence[int], m: int) -> tuple[int, ...]:
    groups = [0] * (m + 1)
    for v in residual:
        groups[v] += 1
    return tuple(groups)


def _histogram_feasible(s_desc: Sequence[int], groups: Sequence[int]) -> bool:
    """Gale–Ryser on remaining row sums (sorted descending) and a residual histogram."""
    if sum(s_desc) != sum(v * c for v, c in enumerate(groups)):
        return False
    running = 0
    for k, value in enumerate(s_desc, start=1):
        running += value
        if running > sum(min(v, k) * c for v, c in enumerate(groups)):
            return False
    return True


def _residual_feasible(s_rest: Sequence[int], residual: Sequence[int], m: int) -> bool:
    if any(v < 0 for v in residual):
        return False
    return _histogram_feasible(sorted(s_rest, reverse=True), _histogram(residual, m))


def _splits(groups: Sequence[int], v: int, need: int) -> Iterator[tuple[int, ...]]:
    """Ways to take ``need`` columns from residual groups v, v+1, ... (group 0 is closed)."""
    if v == len(groups):
        if need == 0:
            yield ()
        return
    for take in range(min(groups[v], need) + 1):
        for rest in _splits(groups, v + 1, need - take):
            yield (take,) + rest


class _CompletionCounter:
    """Counts fillings of rows i..m-1 given the residual column sums."""

    def __init__(self, s: Sequence[int]):
        self.s = tuple(s)
        self.m = len(self.s)
        self.suffix_desc = [sorted(self.s[i:], reverse=True) for i in range(self.m + 1)]
        self.memo: dict[tuple[int, tuple[int, ...]], int] = {}

    def completions(self, i: int, residual: Sequence[int]) -> int:
        if any(v < 0 for v in residual):
            return 0
        return self._count(i, _histogram(residual, self.m))

    def _count(self, i: int, groups: tuple[int, ...]) -> int:
        if not _histogram_feasible(self.suffix_desc[i], groups):
            return 0
        if i == self.m:
            return 1
        key = (i, groups)
        if key in self.memo:
            return self.memo[key]
        total = 0
        for picks in _splits(groups, 1, self.s[i]):
            weight = 1
            nxt = list(groups)
            for v, take in enumerate(picks, start=1):
                if take:
                    weight *= math.comb(groups[v], take)
                    nxt[v] -= take
                    nxt[v - 1] += take
            total += weight * self._count(i + 1, tuple(nxt))
        self.memo[key] = total
        return total


def _rows_in_text_order(n: int, k: int, allowed: int) -> Iterator[int]:
    """Row bitsets with ``k`` ones inside ``allowed``, in lexicographic order of their text."""

    def extend(j: int, left: int, mask: int) -> Iterator[int]:
        if left == 0:
            yield mask
            return
        if n - j < left:
            return
        yield from extend(j + 1, left, mask)
        if (allowed >> j) & 1:
            yield from extend(j + 1, left - 1, mask | (1 << j))

    yield from extend(0, k, 0)


def _after_row(residual: Sequence[int], mask: int) -> list[int]:
    return [v - ((mask >> j) & 1) for j, v in enumerate(residual)]


def _open_columns(residual: Sequence[int]) -> int:
    return sum(1 << j for j, v in enumerate(residual) if v > 0)


def _count_below_first_row(task: tuple[tuple[int, ...], tuple[int, ...]]) -> int:
    s, residual = task
    return _CompletionCounter(s).completions(1, residual)


# ===== EXACT =====

def count_exact(
    margins: MarginSpec,
    mode: Mode = "count",
    cap: int = CAP_CLASS,
    workers: int = 1,
) -> Union[int, Iterator[BinaryMatrix]]:
    """Count or enumerate A(s,t).

    Args:
        margins: Row and column sums
        mode: ``"count"`` returns |A(s,t)|; ``"enumerate"`` returns an iterator
            over the members in lexicographic order of their text
        cap: Largest class the enumerate mode will stream
        workers: Processes for the first-row split of the count

    Returns:
        The exact count, or an iterator of members

    Raises:
        TotalMismatchError: When Σs ≠ Σt
        MarginRangeError: When a sum does not fit its line
        CapExceededError: In enumerate mode when the class is larger than ``cap``
    """
    if mode == "enumerate":
        return enumerate_class(margins, cap)
    return class_size(margins, workers)


def class_size(margins: MarginSpec, workers: int = 1) -> int:
    """Get |A(s,t)| exactly; 0 when the margins are infeasible."""
    if not gale_ryser_feasible(margins):
        return 0
    s, t = margins.s, margins.t
    if workers > 1:
        tasks = []
        for mask in _rows_in_text_order(margins.n, s[0], _open_columns(t)):
            residual = _after_row(t, mask)
            if _residual_feasible(s[1:], residual, margins.m):
                tasks.append((s, tuple(residual)))
        return sum(ordered_map(_count_below_first_row, tasks, workers))
    return _CompletionCounter(s).completions(0, t)


def enumerate_class(margins: MarginSpec, cap: int = CAP_CLASS) -> Iterator[BinaryMatrix]:
    """Iterate over A(s,t) in lexicographic order of the matrix text.

    Raises:
        CapExceededError: When the class is larger than ``cap``
    """
    size = class_size(margins)
    if size > cap:
        raise CapExceededError(f"class has {size} members, cap is {cap}")
    return _members(margins) if size else iter(())


def _members(margins: MarginSpec) -> Iterator[BinaryMatrix]:
    m, n, s = margins.m, margins.n, margins.s
    rows: list[int] = []

    def fill(i: int, residual: list[int]) -> Iterator[BinaryMatrix]:
        if i == m:
            yield BinaryMatrix(m=m, n=n, rows=tuple(rows))
            return
        for mask in _rows_in_text_order(n, s[i], _open_columns(residual)):
            nxt = _after_row(residual, mask)
            if _residual_feasible(s[i + 1:], nxt, m):
                rows.append(mask)
                yield from fill(i + 1, nxt)
                rows.pop()

    yield from fill(0, list(margins.t))


def unrank(margins: MarginSpec, index: int) -> BinaryMatrix:
    """Get the ``index``-th member (0-based) in enumeration order without listing the class.

    Raises:
        DomainError: If ``index`` is outside [0, |A(s,t)|)
    """
    counter = _CompletionCounter(margins.s)
    size = counter.completions(0, margins.t) if gale_ryser_feasible(margins) else 0
    if not 0 <= index < size:
        raise DomainError(f"index {index} outside class of size {size}")
    residual = list(margins.t)
    rows = []
    for i in range(margins.m):
        for mask in _rows_in_text_order(margins.n, margins.s[i], _open_columns(residual)):
            nxt = _after_row(residual, mask)
            below = counter.completions(i + 1, nxt)
            if index < below:
                rows.append(mask)
                residual = nxt
                break
            index -= below
    return BinaryMatrix(m=margins.m, n=margins.n, rows=tuple(rows))


def count_bruteforce(margins: MarginSpec) -> int:
    """Count A(s,t) by filtering all 2^(mn) matrices.

    Raises:
        ProblemTooLargeError: When mn exceeds the filter's limit
    """
    margins.check_structure()
    m, n = margins.m, margins.n
    if m * n > MAX_BRUTEFORCE_CELLS:
        raise ProblemTooLargeError(f"{m}x{n} has too many cells to filter")
    mask = full_mask(n)
    found = 0
    for x in range(1 << (m * n)):
        rows = [(x >> (i * n)) & mask for i in range(m)]
        if tuple(r.bit_count() for r in rows) != margins.s:
            continue
        if all(sum((r >> j) & 1 for r in rows) == margins.t[j] for j in range(n)):
            found += 1
    return found


# ===== ESTIMATES =====

def log_binomial(n: int, k: int) -> float:
    """Natural log of C(n, k) via log-gamma."""
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def estimate_count_leading(margins: MarginSpec) -> CountEstimate:
    """Leading term C(mn,E)⁻¹ · Π C(n,s_i) · Π C(m,t_j) of |A(s,t)|, in log space.

    The unknown multiplicative error factor is not included. When E is 0 or mn
    the class has one member and the estimate is log 1 = 0, flagged degenerate.

    Raises:
        TotalMismatchError: When Σs ≠ Σt
        MarginRangeError: When a sum does not fit its line
    """
    margins.check_structure()
    m, n, total = margins.m, margins.n, margins.total
    if total in (0, m * n):
        return CountEstimate(
            log_value=0.0,
            log_inverse_global=0.0,
            log_row_product=0.0,
            log_column_product=0.0,
            entropy_log=0.0,
            degenerate=True,
        )
    inverse_global = -log_binomial(m * n, total)
    row_product = sum(log_binomial(n, si) for si in margins.s)
    column_product = sum(log_binomial(m, tj) for tj in margins.t)
    lam = float(margins.density)
    entropy = -(lam * math.log(lam) + (1 - lam) * math.log(1 - lam)) * m * n
    return CountEstimate(
        log_value=inverse_global + row_product + column_product,
        log_inverse_global=inverse_global,
        log_row_product=row_product,
        log_column_product=column_product,
        entropy_log=entropy,
    )


def degree_event_log_probability(
    margins: MarginSpec, method: Literal["exact", "leading"] = "exact"
) -> float:
    """log P(the λ-random bipartite graph has degrees (s,t)) = log N(s,t) − log C(mn, E).

    Args:
        margins: Row and column sums
        method: ``"exact"`` counts the class; ``"leading"`` uses the leading-term estimate

    Returns:
        The natural log, or ``-inf`` for an empty class
    """
    margins.check_structure()
    global_term = log_binomial(margins.m * margins.n, margins.total)
    if method == "leading":
        return estimate_count_leading(margins).log_value - global_term
    size = class_size(margins)
    if size == 0:
        return -math.inf
    return _log_big(size) - global_term


def _log_big(value: int) -> float:
    """Natural log of a positive integer too large for float conversion."""
    shift = max(value.bit_length() - 60, 0)
    return math.log(value >> shift) + shift * math.log(2)


def leading_ratio_log(margins: MarginSpec, exact: Optional[int] = None) -> float:
    """log(exact / leading estimate) for a nonempty class."""
    exact = class_size(margins) if exact is None else exact
    if exact == 0:
        raise EmptyClassError(f"no matrix has margins {margins.to_json()}")
    return _log_big(exact) - estimate_count_leading(margins).log_value

