"""Samplers over A(s,t) and the independent-edge bipartite model.

Exact uniform sampling ranks into the enumeration order of the class. Beyond
enumeration scale a lazy switch chain is used: each step picks two rows and two
columns uniformly and flips the 2×2 submatrix when it is a checkerboard.
"""

import logging
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from defining_sets.config import CAP_CLASS
from defining_sets.counting import class_size, unrank
from defining_sets.errors import CapExceededError, DomainError, EmptyClassError
from defining_sets.parallel import make_rng, ordered_map
from defining_sets.run_logger import log_chain
from defining_sets.state_experiment import ChainConfig
from defining_sets.state_matrix import BinaryMatrix, MarginSpec

logger = logging.getLogger(__name__)

# Random indices drawn per numpy call
DRAW_BLOCK = 4096


# ===== EXACT =====

def sample_uniform_exact(margins: MarginSpec, seed: int, cap: int = CAP_CLASS) -> BinaryMatrix:
    """Draw a member of A(s,t) exactly uniformly.

    Raises:
        EmptyClassError: If the class is empty
        CapExceededError: If the class has more than ``cap`` members
    """
    size = class_size(margins)
    if size == 0:
        raise EmptyClassError(f"no matrix has margins {margins.to_json()}")
    if size > cap:
        raise CapExceededError(f"class has {size} members, cap is {cap}")
    index = int(make_rng(seed).integers(size))
    return unrank(margins, index)


# ===== SWITCH CHAIN =====

def switch_step(matrix: BinaryMatrix, i: int, i2: int, j: int, j2: int) -> BinaryMatrix:
    """Flip the 2×2 submatrix on rows i, i2 and columns j, j2 if it is a checkerboard."""
    rows = list(matrix.rows)
    if _flip(rows, i, i2, j, j2):
        return BinaryMatrix(m=matrix.m, n=matrix.n, rows=tuple(rows))
    return matrix


def _flip(rows: list[int], i: int, i2: int, j: int, j2: int) -> bool:
    a = (rows[i] >> j) & 1
    b = (rows[i] >> j2) & 1
    if a == b or ((rows[i2] >> j) & 1) != b or ((rows[i2] >> j2) & 1) != a:
        return False
    swap = (1 << j) | (1 << j2)
    rows[i] ^= swap
    rows[i2] ^= swap
    return True


class _SwitchWalker:
    """Mutable chain state with its private generator."""

    def __init__(self, start: BinaryMatrix, seed: int):
        self.m, self.n = start.m, start.n
        self.rows = list(start.rows)
        self.rng = make_rng(seed)
        self.steps = 0
        self.active = 0

    def advance(self, steps: int) -> None:
        self.steps += steps
        if self.m < 2 or self.n < 2:
            return
        high = np.array([self.m, self.m - 1, self.n, self.n - 1])
        while steps > 0:
            block = min(steps, DRAW_BLOCK)
            for i, i2, j, j2 in self.rng.integers(0, high, size=(block, 4)).tolist():
                # second index drawn from the remaining m-1 (n-1) positions
                if i2 >= i:
                    i2 += 1
                if j2 >= j:
                    j2 += 1
                if _flip(self.rows, i, i2, j, j2):
                    self.active += 1
            steps -= block

    def snapshot(self) -> BinaryMatrix:
        return BinaryMatrix(m=self.m, n=self.n, rows=tuple(self.rows))


def iter_switch_chain(start: BinaryMatrix, config: ChainConfig) -> Iterator[BinaryMatrix]:
    """Yield the chain state after ``burnin`` steps and then after every ``thin`` more."""
    walker = _SwitchWalker(start, config.seed)
    walker.advance(config.burnin)
    while True:
        yield walker.snapshot()
        walker.advance(config.thin)


def switch_chain_sample(start: BinaryMatrix, config: ChainConfig) -> BinaryMatrix:
    """Run burnin + thin steps from ``start`` and return the final state."""
    walker = _SwitchWalker(start, config.seed)
    walker.advance(config.burnin + config.thin)
    log_chain(walker.steps, walker.active, config.seed)
    return walker.snapshot()


def _run_one_chain(task: tuple[BinaryMatrix, ChainConfig, int]) -> list[BinaryMatrix]:
    start, config, count = task
    chain = iter_switch_chain(start, config)
    return [next(chain) for _ in range(count)]


def run_chains(
    start: BinaryMatrix,
    config: ChainConfig,
    samples: int,
    chains: int = 1,
    workers: int = 1,
) -> list[BinaryMatrix]:
    """Retain ``samples`` states spread round-robin over independent chains.

    Chain c uses seed ``config.seed + c`` and supplies samples c, c + chains, ...
    The result is ordered by sample index and does not depend on ``workers``.
    """
    if chains < 1:
        raise DomainError("at least one chain is required")
    tasks = []
    for c in range(chains):
        count = len(range(c, samples, chains))
        seeded = ChainConfig(burnin=config.burnin, thin=config.thin, seed=config.seed + c)
        tasks.append((start, seeded, count))
    per_chain = ordered_map(_run_one_chain, tasks, workers)
    out = [per_chain[i % chains][i // chains] for i in range(samples)]
    logger.debug("retained %d samples from %d chains", samples, chains)
    return out


# ===== INDEPENDENT EDGES =====

def sample_bernoulli_bipartite(
    m: int, n: int, density: Union[Fraction, float], seed: int
) -> BinaryMatrix:
    """Each cell is 1 independently with probability ``density``.

    Raises:
        DomainError: If ``density`` is outside [0, 1]
    """
    if not 0 <= density <= 1:
        raise DomainError(f"density {density} outside [0, 1]")
    cells = make_rng(seed).random((m, n)) < float(density)
    weights = [1 << j for j in range(n)]
    rows = tuple(sum(w for w, bit in zip(weights, row) if bit) for row in cells.tolist())
    return BinaryMatrix(m=m, n=n, rows=rows)
