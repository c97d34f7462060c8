"""Result Schemas for Defining Sets, Counting, Discrepancy and Bounds.

This module defines the structured records returned by the analysis modules
and the JSON shapes the command line prints for them.
"""

from fractions import Fraction
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from defining_sets.core import serialize_matrix
from defining_sets.state_matrix import GoodFormWitness, IndexSet, PartialMatrix

# ===== DEFINING SETS =====

class WalkSplitCounts(BaseModel):
    """Zeros and ones of M above and below a walk."""

    model_config = ConfigDict(frozen=True)

    alpha0: int = Field(ge=0, description="Zeros strictly above the walk")
    alpha1: int = Field(ge=0, description="Ones strictly above the walk")
    beta0: int = Field(ge=0, description="Zeros strictly below the walk")
    beta1: int = Field(ge=0, description="Ones strictly below the walk")

    @property
    def defining_cost(self) -> int:
        """Size α₁ + β₀ of the defining set the walk induces."""
        return self.alpha1 + self.beta0


class SdsResult(BaseModel):
    """Smallest defining set found for a matrix, with its good-form witness."""

    model_config = ConfigDict(frozen=True)

    value: int = Field(ge=0, description="sds(M), or an upper bound when exact is False")
    witness_d: PartialMatrix = Field(description="A defining set of the reported size")
    witness: GoodFormWitness = Field(description="Arrangement putting M minus witness_d in good form")
    exact: bool = Field(default=True, description="Whether value is proven minimal")

    @model_validator(mode="after")
    def _check_size(self) -> "SdsResult":
        if self.witness_d.size != self.value:
            raise ValueError(f"witness has {self.witness_d.size} cells, value is {self.value}")
        return self

    def to_json(self) -> dict:
        return {
            "sds": self.value,
            "D": serialize_matrix(self.witness_d),
            "witness": self.witness.to_json(),
            "exact": self.exact,
        }


# ===== COUNTING =====

class CountEstimate(BaseModel):
    """Leading-term estimate of |A(s,t)| in log space."""

    model_config = ConfigDict(frozen=True)

    log_value: float = Field(description="Natural log of the estimate")
    log_inverse_global: float = Field(description="-log C(mn, E)")
    log_row_product: float = Field(description="Σ log C(n, s_i)")
    log_column_product: float = Field(description="Σ log C(m, t_j)")
    entropy_log: float = Field(
        description="-(λ log λ + λ' log λ')·mn, the entropy approximation of log C(mn, E)"
    )
    degenerate: bool = Field(default=False, description="E is 0 or mn; the class has one member")


# ===== DISCREPANCY =====

class DiscrepancyValue(BaseModel):
    """Exact discrepancy δ(M[R,C]) held as scaled / denominator."""

    model_config = ConfigDict(frozen=True)

    scaled: int = Field(description="mn·ones(R,C) − E·|R||C|")
    denominator: int = Field(gt=0, description="mn")

    @property
    def as_fraction(self) -> Fraction:
        return Fraction(self.scaled, self.denominator)

    def __abs__(self) -> "DiscrepancyValue":
        return DiscrepancyValue(scaled=abs(self.scaled), denominator=self.denominator)


class MaxDiscrepancyResult(BaseModel):
    """Largest |δ| found over subarrays, with the subarray achieving it."""

    model_config = ConfigDict(frozen=True)

    value: DiscrepancyValue = Field(description="Signed discrepancy of the witness subarray")
    rows: IndexSet = Field(description="Row set of the witness")
    cols: IndexSet = Field(description="Column set of the witness")
    exact: bool = Field(description="True for a full scan, False for a sampled lower bound")

    @property
    def abs_scaled(self) -> int:
        return abs(self.value.scaled)


class CertificateInput(BaseModel):
    """Parameters of the walk-block lower bound on defining-set size."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    n: int = Field(ge=1)
    density_num: int = Field(ge=0, description="Numerator of λ")
    density_den: int = Field(gt=0, description="Denominator of λ")
    delta_scaled: int = Field(ge=0, description="Uniform bound on |δ| times mn")

    @property
    def density(self) -> Fraction:
        return Fraction(self.density_num, self.density_den)

    @property
    def delta(self) -> Fraction:
        return Fraction(self.delta_scaled, self.m * self.n)

    @property
    def h(self) -> int:
        """⌈m^{3/4}⌉, computed exactly."""
        return _ceil_fourth_root(self.m**3)

    @property
    def blocks(self) -> int:
        """⌈m^{1/4}⌉, computed exactly."""
        return _ceil_fourth_root(self.m)


def _ceil_fourth_root(x: int) -> int:
    r = 0
    while r**4 < x:
        r += 1
    return r


# ===== BOUNDS =====

class HypothesisCheck(BaseModel):
    """One hypothesis of the density lower bound evaluated on concrete margins."""

    model_config = ConfigDict(frozen=True)

    name: str
    holds: bool
    lhs: Union[float, int]
    rhs: Union[float, int]


class HypothesisReport(BaseModel):
    """Every hypothesis check plus their conjunction."""

    model_config = ConfigDict(frozen=True)

    checks: tuple[HypothesisCheck, ...]
    log_base: str = Field(default="natural", description="Base of the log in the balance check")

    @property
    def overall(self) -> bool:
        return all(c.holds for c in self.checks)

    def get(self, name: str) -> Optional[HypothesisCheck]:
        return next((c for c in self.checks if c.name == name), None)

    def to_json(self) -> dict:
        return {
            "overall": self.overall,
            "log_base": self.log_base,
            "checks": [c.model_dump() for c in self.checks],
        }


class FailureProbabilityBound(BaseModel):
    """Union-bound estimate that some subarray deviates by more than λN."""

    model_config = ConfigDict(frozen=True)

    n_threshold: int = Field(description="N = ⌊(c/λ)·threshold⌋")
    log_large_pairs_term: float = Field(description="log of exp(−λN²/(3mn))·2^{m+n+1}")
    log_small_pairs_term: float = Field(description="log of exp(−λN/3)·2^{m+n}")
    large_pairs_term: float
    small_pairs_term: float
    total: float = Field(description="Raw sum; may exceed 1 at small scale")
    as_probability: float = Field(ge=0.0, le=1.0, description="total clipped to [0, 1]")
