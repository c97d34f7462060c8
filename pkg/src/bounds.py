"""Closed-form probability bounds and the density lower-bound hypothesis checker.

Every O(·) of the asymptotic statements is replaced by an explicit constant
supplied by the caller. Logs are natural.
"""

import logging
import math
from fractions import Fraction
from typing import Literal, Union

import numpy as np

from defining_sets.counting import degree_event_log_probability
from defining_sets.discrepancy import concentration_threshold
from defining_sets.errors import DomainError
from defining_sets.state_analysis import FailureProbabilityBound, HypothesisCheck, HypothesisReport
from defining_sets.state_matrix import MarginSpec

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]

# math.exp overflows just above this
_MAX_EXP = 709.0


def chernoff_bound(gamma: float, mu: float, variant: Literal["upper", "twosided"] = "upper") -> float:
    """Chernoff tail bound for a sum of independent Bernoulli variables with mean μ.

    ``upper``: P(X ≥ (1+γ)μ) ≤ exp(−γ²μ/(2+γ)) for γ > 0.
    ``twosided``: P(|X − μ| ≥ γμ) ≤ 2·exp(−μγ²/3) for 0 < γ < 1.

    Raises:
        DomainError: If γ is outside the variant's range or μ < 0
    """
    if mu < 0:
        raise DomainError(f"mu must be non-negative, got {mu}")
    if variant == "upper":
        if gamma <= 0:
            raise DomainError(f"upper bound needs gamma > 0, got {gamma}")
        return math.exp(-gamma * gamma * mu / (2 + gamma))
    if not 0 < gamma < 1:
        raise DomainError(f"two-sided bound needs 0 < gamma < 1, got {gamma}")
    return 2 * math.exp(-mu * gamma * gamma / 3)


def balance_lhs(m: int, n: int, density: Fraction) -> Fraction:
    """(1−2λ)²/(4λ(1−λ)) · (1 + 5m/(6n) + 5n/(6m)), exactly.

    Raises:
        DomainError: Unless 0 < λ < 1
    """
    lam = Fraction(density)
    if not 0 < lam < 1:
        raise DomainError(f"density {lam} outside (0, 1)")
    return (1 - 2 * lam) ** 2 / (4 * lam * (1 - lam)) * (1 + Fraction(5 * m, 6 * n) + Fraction(5 * n, 6 * m))


def density_hypotheses_check(
    margins: MarginSpec,
    eps: float,
    c_row: float = 1.0,
    c_col: float = 1.0,
    lambda_min: float = 0.0,
) -> HypothesisReport:
    """Evaluate every hypothesis of the density lower bound on concrete margins.

    Failures are reported in the returned checks, never raised. λ is taken as
    Σs/(mn) so the report is still produced when the totals disagree.

    Args:
        margins: Row and column sums
        eps: The ε of the regularity clauses
        c_row: Constant bounding max_i |s_i − s| by c_row·n^{1/2+ε}
        c_col: Constant bounding max_j |t_j − t| by c_col·m^{1/2+ε}
        lambda_min: Smallest admissible density

    Returns:
        One check per hypothesis plus their conjunction
    """
    m, n = margins.m, margins.n
    row_total, col_total = sum(margins.s), sum(margins.t)
    lam = Fraction(row_total, m * n)
    mean_row = Fraction(row_total, m)
    mean_col = Fraction(row_total, n)
    row_spread = float(max(abs(si - mean_row) for si in margins.s))
    col_spread = float(max(abs(tj - mean_col) for tj in margins.t))
    row_allowance = c_row * n ** (0.5 + eps)
    col_allowance = c_col * m ** (0.5 + eps)
    balance = float(balance_lhs(m, n, lam)) if 0 < lam < 1 else math.inf
    balance_rhs = math.log(m) / 3

    checks = (
        HypothesisCheck(name="n_le_m", holds=n <= m, lhs=n, rhs=m),
        HypothesisCheck(name="totals_equal", holds=row_total == col_total, lhs=row_total, rhs=col_total),
        HypothesisCheck(name="density_at_most_half", holds=lam <= Fraction(1, 2), lhs=float(lam), rhs=0.5),
        HypothesisCheck(name="density_at_least_min", holds=float(lam) >= lambda_min, lhs=float(lam), rhs=lambda_min),
        HypothesisCheck(name="row_regularity", holds=row_spread <= row_allowance, lhs=row_spread, rhs=row_allowance),
        HypothesisCheck(name="column_regularity", holds=col_spread <= col_allowance, lhs=col_spread, rhs=col_allowance),
        HypothesisCheck(name="balance", holds=balance <= balance_rhs, lhs=balance, rhs=balance_rhs),
    )
    return HypothesisReport(checks=checks)


def _exp(x: float) -> float:
    return math.inf if x > _MAX_EXP else math.exp(x)


def failure_probability_bound(m: int, n: int, density: Number, c: float, eps: float) -> FailureProbabilityBound:
    """Union bound on some subarray deviating from λ|A||B| by more than λN.

    N = ⌊(c/λ)·(m·n^{1/2+ε} + n·m^{1/2+ε})⌋. Pairs with |A||B| > N contribute
    exp(−λN²/(3mn))·2^{m+n+1}; pairs with |A||B| ≤ N contribute exp(−λN/3)·2^{m+n}.
    The raw total is kept even when it exceeds 1.

    Raises:
        DomainError: Unless c > 0 and 0 < λ ≤ 1/2
    """
    lam = float(density)
    if c <= 0:
        raise DomainError(f"c must be positive, got {c}")
    if not 0 < lam <= 0.5:
        raise DomainError(f"density {density} outside (0, 1/2]")
    big_n = math.floor((c / lam) * concentration_threshold(m, n, 1.0, eps))
    log_large = -lam * big_n * big_n / (3 * m * n) + (m + n + 1) * math.log(2)
    log_small = -lam * big_n / 3 + (m + n) * math.log(2)
    large, small = _exp(log_large), _exp(log_small)
    total = large + small
    return FailureProbabilityBound(
        n_threshold=big_n,
        log_large_pairs_term=log_large,
        log_small_pairs_term=log_small,
        large_pairs_term=large,
        small_pairs_term=small,
        total=total,
        as_probability=min(1.0, total),
    )


def conditional_failure_log_bound(
    margins: MarginSpec,
    c: float,
    eps: float,
    method: Literal["exact", "leading"] = "exact",
) -> float:
    """log of P_λ(P) / P_λ(degrees are (s,t)), bounding the failure probability within A(s,t).

    Args:
        margins: Row and column sums with density at most 1/2
        c: Threshold constant
        eps: Threshold exponent
        method: How the degree-event probability is obtained

    Returns:
        Natural log of the bound; ``inf`` for an empty class
    """
    bound = failure_probability_bound(margins.m, margins.n, margins.density, c, eps)
    log_failure = float(np.logaddexp(bound.log_large_pairs_term, bound.log_small_pairs_term))
    return log_failure - degree_event_log_probability(margins, method)
