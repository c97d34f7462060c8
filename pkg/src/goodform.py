"""Good form of partial matrices and rearrangements into good form.

A partial matrix is in good form when, in every row, each revealed 1 lies
strictly left of each revealed 0, and, in every column, each revealed 0 lies
strictly above each revealed 1. Whether the rows and columns can be permuted
into good form is decided by the column precedence digraph: an edge a→b
records that some row reveals a 1 in column a and a 0 in column b.
"""

import itertools
import logging
import math
from typing import Literal, Optional, Sequence

import networkx as nx

from defining_sets.config import CAP_BRUTEFORCE
from defining_sets.errors import CapExceededError
from defining_sets.state_matrix import GoodFormWitness, PartialMatrix, Walk

logger = logging.getLogger(__name__)

Method = Literal["digraph", "bruteforce"]


class ColumnPrecedenceDigraph:
    """Column constraints of a partial matrix, one node per column."""

    def __init__(self, partial: PartialMatrix):
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(range(partial.n))
        for i in range(partial.m):
            ones = _bits(partial.ones_mask(i))
            zeros = _bits(partial.zeros_mask(i))
            self.graph.add_edges_from((a, b) for a in ones for b in zeros)

    def has_edge(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)

    def topological_order(self) -> Optional[list[int]]:
        """Get the lexicographically smallest topological order, or None on a cycle."""
        try:
            return list(nx.lexicographical_topological_sort(self.graph))
        except nx.NetworkXUnfeasible:
            return None


def _bits(mask: int) -> list[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def is_good_form(partial: PartialMatrix) -> bool:
    """Check the row condition (ones before zeros) and column condition (zeros above ones)."""
    for i in range(partial.m):
        ones = partial.ones_mask(i)
        zeros = partial.zeros_mask(i)
        if ones and zeros and ones.bit_length() - 1 >= (zeros & -zeros).bit_length() - 1:
            return False
    # column condition: once a 1 has appeared in a column, no later row may reveal a 0 there
    seen_one = 0
    for i in range(partial.m):
        if partial.zeros_mask(i) & seen_one:
            return False
        seen_one |= partial.ones_mask(i)
    return True


def canonical_walk(partial: PartialMatrix) -> Walk:
    """Smallest walk keeping every revealed 1 below it: f(i) = max(f(i-1), rightmost 1 in row i)."""
    f = [0]
    for i in range(partial.m):
        f.append(max(f[-1], partial.ones_mask(i).bit_length()))
    return Walk(f=tuple(f))


def walk_is_valid(partial: PartialMatrix, walk: Walk) -> bool:
    """Whether every revealed 1 is below ``walk`` and every revealed 0 above it."""
    for i in range(partial.m):
        below = walk.below_mask(i)
        if partial.ones_mask(i) & ~below or partial.zeros_mask(i) & below:
            return False
    return True


def witness_walk(partial: PartialMatrix) -> Optional[Walk]:
    """Get the canonical walk for ``partial`` as arranged, or None if it is not valid.

    The canonical walk is pointwise the smallest admissible one, so it is valid
    whenever any walk is.
    """
    walk = canonical_walk(partial)
    return walk if walk_is_valid(partial, walk) else None


def _arrange_by_column_order(partial: PartialMatrix, col_order: Sequence[int]) -> GoodFormWitness:
    """Sort rows by rightmost revealed 1 under ``col_order`` and use those positions as the walk."""
    position = {c: q for q, c in enumerate(col_order)}
    reach = []
    for i in range(partial.m):
        ones = _bits(partial.ones_mask(i))
        reach.append(max((position[c] + 1 for c in ones), default=0))
    row_perm = sorted(range(partial.m), key=lambda i: (reach[i], i))
    walk = Walk(f=(0,) + tuple(reach[i] for i in row_perm))
    return GoodFormWitness(row_perm=tuple(row_perm), col_perm=tuple(col_order), walk=walk)


def permutable_to_good_form(
    partial: PartialMatrix,
    method: Method = "digraph",
    cap: int = CAP_BRUTEFORCE,
) -> Optional[GoodFormWitness]:
    """Find row and column permutations putting ``partial`` in good form.

    Args:
        partial: The partial matrix to rearrange
        method: ``"digraph"`` (topological order of column constraints) or
            ``"bruteforce"`` (every row and column permutation)
        cap: Largest m!·n! the brute-force method will try

    Returns:
        A witness whose walk is valid for the rearranged matrix, or None

    Raises:
        CapExceededError: For the brute-force method beyond ``cap``
    """
    if method == "digraph":
        order = ColumnPrecedenceDigraph(partial).topological_order()
        if order is None:
            return None
        return _arrange_by_column_order(partial, order)

    work = math.factorial(partial.m) * math.factorial(partial.n)
    if work > cap:
        raise CapExceededError(f"brute force needs {work} arrangements, cap is {cap}")
    for col_perm in itertools.permutations(range(partial.n)):
        for row_perm in itertools.permutations(range(partial.m)):
            walk = witness_walk(partial.permuted(row_perm, col_perm))
            if walk is not None:
                return GoodFormWitness(row_perm=row_perm, col_perm=col_perm, walk=walk)
    return None


def witness_is_sound(partial: PartialMatrix, witness: GoodFormWitness) -> bool:
    """Check that ``witness`` really puts ``partial`` in good form."""
    arranged = partial.permuted(witness.row_perm, witness.col_perm)
    return is_good_form(arranged) and walk_is_valid(arranged, witness.walk)
