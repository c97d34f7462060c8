"""Oracle cross-check suites.

Each suite runs two independent methods on the same inputs and counts the
cases where they disagree. Small shapes are covered exhaustively and larger
ones by seeded samples. Results are logged with the ``[SUITE]`` tag and
returned as :class:`SuiteResult` records shared by the tests and the
``verify`` subcommand.
"""

import itertools
import logging
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from scipy.stats import chisquare

from defining_sets.core import circulant_member, margins_of, serialize_matrix
from defining_sets.counting import class_size, count_bruteforce, enumerate_class
from defining_sets.defining import (
    critical_complement_is_defining,
    is_critical,
    is_defining,
    minimalize_to_critical,
    sds_bruteforce,
    sds_exact,
)
from defining_sets.discrepancy import certificate_for, delta_scaled, max_discrepancy, max_discrepancy_bruteforce
from defining_sets.goodform import permutable_to_good_form, witness_is_sound
from defining_sets.parallel import make_rng
from defining_sets.run_logger import log_suite_result
from defining_sets.sampling import iter_switch_chain, sample_bernoulli_bipartite, sample_uniform_exact
from defining_sets.state_experiment import ChainConfig, SuiteResult
from defining_sets.state_matrix import BinaryMatrix, MarginSpec, PartialMatrix

logger = logging.getLogger(__name__)

# Uniformity tests pass when the chi-square p-value exceeds this
UNIFORMITY_P_VALUE = 0.01


# ===== CASE GENERATORS =====

def shapes(max_dim: int) -> list[tuple[int, int]]:
    return [(m, n) for m in range(1, max_dim + 1) for n in range(1, max_dim + 1)]


def all_matrices(m: int, n: int) -> Iterator[BinaryMatrix]:
    """Every m×n binary matrix, which covers every member of every class of that shape."""
    mask = (1 << n) - 1
    for x in range(1 << (m * n)):
        yield BinaryMatrix(m=m, n=n, rows=tuple((x >> (i * n)) & mask for i in range(m)))


def subsets_of(matrix: BinaryMatrix) -> Iterator[PartialMatrix]:
    """Every partial matrix D ⊆ M."""
    mask = (1 << matrix.n) - 1
    for x in range(1 << (matrix.m * matrix.n)):
        known = tuple((x >> (i * matrix.n)) & mask for i in range(matrix.m))
        yield _reveal(matrix, known)


def _reveal(matrix: BinaryMatrix, known: tuple[int, ...]) -> PartialMatrix:
    values = tuple(r & k for r, k in zip(matrix.rows, known))
    return PartialMatrix(m=matrix.m, n=matrix.n, known=known, values=values)


def random_subset(matrix: BinaryMatrix, seed: int) -> PartialMatrix:
    """Reveal each cell of ``matrix`` independently with probability 1/2."""
    bits = make_rng(seed).integers(0, 2, size=(matrix.m, matrix.n)).tolist()
    known = tuple(sum(1 << j for j, b in enumerate(row) if b) for row in bits)
    return _reveal(matrix, known)


def random_matrices(m: int, n: int, count: int, seed: int) -> Iterator[BinaryMatrix]:
    for i in range(count):
        yield sample_bernoulli_bipartite(m, n, Fraction(1, 2), seed + i)


def all_partials(m: int, n: int) -> Iterator[PartialMatrix]:
    """Every m×n partial matrix over {0, 1, *}."""
    for cells in itertools.product((None, 0, 1), repeat=m * n):
        yield PartialMatrix.from_cells(
            m, n, ((k // n, k % n, v) for k, v in enumerate(cells) if v is not None)
        )


def random_partial(m: int, n: int, seed: int) -> PartialMatrix:
    draws = make_rng(seed).integers(0, 3, size=m * n).tolist()
    return PartialMatrix.from_cells(m, n, ((k // n, k % n, v - 1) for k, v in enumerate(draws) if v))


def _describe(*objs: object) -> str:
    parts = []
    for obj in objs:
        if isinstance(obj, (BinaryMatrix, PartialMatrix)):
            parts.append(serialize_matrix(obj).replace("\n", "/"))
        else:
            parts.append(str(obj))
    return " ; ".join(parts)


def _run_suite(name: str, cases: Iterable, agrees: Callable[..., bool]) -> SuiteResult:
    checked = failures = 0
    first: Optional[str] = None
    for case in cases:
        checked += 1
        if not agrees(*case):
            failures += 1
            if first is None:
                first = _describe(*case)
    log_suite_result(name, checked, failures, first)
    return SuiteResult(name=name, cases=checked, failures=failures, counterexample=first)


# ===== SUITES =====

def suite_goodform(max_dim: int = 3, samples: int = 5000, seed: int = 0) -> SuiteResult:
    """Digraph permutability test against the factorial arrangement search.

    Shapes with at most six cells are exhaustive over every {0,1,*} filling;
    larger shapes up to ``max_dim`` are sampled.
    """
    def cases():
        for m, n in shapes(max_dim):
            if m * n <= 6:
                yield from ((p,) for p in all_partials(m, n))
            else:
                yield from ((random_partial(m, n, seed + i),) for i in range(samples))

    def agrees(partial: PartialMatrix) -> bool:
        fast = permutable_to_good_form(partial, method="digraph")
        slow = permutable_to_good_form(partial, method="bruteforce")
        if (fast is None) != (slow is None):
            return False
        return fast is None or witness_is_sound(partial, fast)

    return _run_suite("goodform", cases(), agrees)


def suite_defining(
    max_dim: int = 3,
    samples: int = 500,
    sampled_sizes: tuple[int, ...] = (4, 5),
    seed: int = 0,
) -> SuiteResult:
    """Good-form defining test against completion counting, for every D ⊆ M."""
    def cases():
        for m, n in shapes(max_dim):
            for matrix in all_matrices(m, n):
                yield from ((d, matrix) for d in subsets_of(matrix))
        for size in sampled_sizes:
            for i, matrix in enumerate(random_matrices(size, size, samples, seed)):
                yield random_subset(matrix, seed + samples + i), matrix

    def agrees(d: PartialMatrix, matrix: BinaryMatrix) -> bool:
        return is_defining(d, matrix, "goodform") == is_defining(d, matrix, "oracle")

    return _run_suite("defining", cases(), agrees)


def suite_sds(max_dim: int = 3, samples: int = 100, sampled_size: int = 4, seed: int = 0) -> SuiteResult:
    """Exact solver against smallest-subset search; the witness must be defining."""
    def cases():
        for m, n in shapes(max_dim):
            yield from ((matrix,) for matrix in all_matrices(m, n))
        yield from ((matrix,) for matrix in random_matrices(sampled_size, sampled_size, samples, seed))

    def agrees(matrix: BinaryMatrix) -> bool:
        result = sds_exact(matrix)
        witness_ok = result.witness_d.size == result.value and is_defining(result.witness_d, matrix, "oracle")
        return witness_ok and sds_bruteforce(matrix).size == result.value

    return _run_suite("sds", cases(), agrees)


def suite_certificate(max_dim: int = 3, samples: int = 100, sampled_size: int = 4, seed: int = 0) -> SuiteResult:
    """Walk-block certificate never exceeds the exact sds."""
    def cases():
        for m, n in shapes(max_dim):
            yield from ((matrix,) for matrix in all_matrices(m, n))
        yield from ((matrix,) for matrix in random_matrices(sampled_size, sampled_size, samples, seed))

    def agrees(matrix: BinaryMatrix) -> bool:
        bound = certificate_for(matrix, max_discrepancy(matrix).abs_scaled)
        return bound <= sds_exact(matrix).value

    return _run_suite("certificate", cases(), agrees)


def suite_counting(max_dim: int = 3) -> SuiteResult:
    """Backtracking count against the 2^(mn) filter, and enumeration against the count."""
    def cases():
        for m, n in shapes(max_dim):
            for s in itertools.product(range(n + 1), repeat=m):
                for t in itertools.product(range(m + 1), repeat=n):
                    if sum(s) == sum(t):
                        yield (MarginSpec(s=s, t=t),)

    def agrees(margins: MarginSpec) -> bool:
        size = class_size(margins)
        if size != count_bruteforce(margins):
            return False
        members = list(enumerate_class(margins))
        return (
            len(members) == size
            and len(set(members)) == size
            and all(margins_of(member) == margins for member in members)
        )

    return _run_suite("counting", cases(), agrees)


def suite_discrepancy(max_dim: int = 3, samples: int = 50, sampled_size: int = 8, seed: int = 0) -> SuiteResult:
    """Reduced exact scan against the full subset-pair scan, witness included."""
    def cases():
        for m, n in shapes(max_dim):
            yield from ((matrix,) for matrix in all_matrices(m, n))
        yield from ((matrix,) for matrix in random_matrices(sampled_size, sampled_size, samples, seed))

    def agrees(matrix: BinaryMatrix) -> bool:
        fast = max_discrepancy(matrix)
        slow = max_discrepancy_bruteforce(matrix)
        witness = delta_scaled(matrix, fast.rows, fast.cols)
        return fast.abs_scaled == slow.abs_scaled and witness.scaled == fast.value.scaled

    return _run_suite("discrepancy", cases(), agrees)


def suite_critical(samples: int = 100, size: int = 4, seed: int = 0) -> SuiteResult:
    """Minimalizing the full matrix gives a critical set whose complement is defining."""
    def cases():
        yield from ((matrix,) for matrix in random_matrices(size, size, samples, seed))

    def agrees(matrix: BinaryMatrix) -> bool:
        critical = minimalize_to_critical(PartialMatrix.from_matrix(matrix), matrix)
        return is_critical(critical, matrix) and critical_complement_is_defining(critical, matrix)

    return _run_suite("critical", cases(), agrees)


def chain_preserves_margins(start: BinaryMatrix, steps: int, seed: int = 0) -> bool:
    """Check the margins after every single switch-chain step."""
    target = margins_of(start)
    chain = iter_switch_chain(start, ChainConfig(burnin=0, thin=1, seed=seed))
    return all(margins_of(next(chain)) == target for _ in range(steps + 1))


def chain_uniformity_p_value(margins: MarginSpec, samples: int, thin: int, seed: int = 0) -> float:
    """Chi-square p-value of switch-chain samples against the uniform law on A(s,t)."""
    members = list(enumerate_class(margins))
    index = {member: k for k, member in enumerate(members)}
    start = members[0]
    config = ChainConfig(burnin=ChainConfig.default_for(margins.m, margins.n).burnin, thin=thin, seed=seed)
    counts = [0] * len(members)
    chain = iter_switch_chain(start, config)
    for _ in range(samples):
        counts[index[next(chain)]] += 1
    return float(chisquare(counts).pvalue)


def exact_uniformity_p_value(margins: MarginSpec, samples: int, seed: int = 0) -> float:
    """Chi-square p-value of the exact sampler over ``samples`` derived seeds."""
    members = list(enumerate_class(margins))
    index = {member: k for k, member in enumerate(members)}
    counts = [0] * len(members)
    for i in range(samples):
        counts[index[sample_uniform_exact(margins, seed + i)]] += 1
    return float(chisquare(counts).pvalue)


def suite_sampler(steps: int = 10**6, samples: int = 60000, seed: int = 0) -> SuiteResult:
    """Margins preserved at every switch step; chain and exact sampler pass chi-square."""
    permutations = MarginSpec.regular(3, 1)
    pair = MarginSpec.regular(2, 1)

    def cases():
        yield ("margins", steps)
        yield ("chain", samples)
        yield ("exact", samples)

    def agrees(check: str, count: int) -> bool:
        if check == "margins":
            return chain_preserves_margins(circulant_member(6, 3), count, seed)
        if check == "chain":
            return chain_uniformity_p_value(permutations, count, thin=45, seed=seed) > UNIFORMITY_P_VALUE
        return exact_uniformity_p_value(pair, count, seed) > UNIFORMITY_P_VALUE

    return _run_suite("sampler", cases(), agrees)


def run_all_suites(max_dim: int = 3, samples: Optional[int] = None, seed: int = 0) -> list[SuiteResult]:
    """Run every suite.

    Args:
        max_dim: Largest side of the exhaustively covered shapes
        samples: Seeded cases per sampling suite; each suite's own full size when None
        seed: Base seed of the sampled cases
    """
    if samples is None:
        return [
            suite_goodform(max_dim, seed=seed),
            suite_defining(max_dim, seed=seed),
            suite_sds(max_dim, seed=seed),
            suite_certificate(max_dim, seed=seed),
            suite_counting(max_dim),
            suite_discrepancy(max_dim, seed=seed),
            suite_critical(seed=seed),
            suite_sampler(seed=seed),
        ]
    return [
        suite_goodform(max_dim, samples, seed),
        suite_defining(max_dim, samples, seed=seed),
        suite_sds(max_dim, samples, seed=seed),
        suite_certificate(max_dim, samples, seed=seed),
        suite_counting(max_dim),
        suite_discrepancy(max_dim, samples, seed=seed),
        suite_critical(samples, seed=seed),
        suite_sampler(steps=1000 * samples, samples=600 * samples, seed=seed),
    ]
