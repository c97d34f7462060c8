"""Configuration and Result Schemas for Experiments and Verification Suites.

This defines the validated records the command line builds from its flags,
the switch-chain schedule, and the outcome of an oracle cross-check suite.
"""

import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from defining_sets.config import CAP_CLASS, CAP_FACTORIAL, WORKERS
from defining_sets.state_matrix import MarginSpec

ExperimentName = Literal["sds", "count", "discrepancy", "critical", "verify", "bounds", "maxsds"]

DEFAULT_SAMPLES = 10

# ===== SAMPLING =====

class ChainConfig(BaseModel):
    """Schedule of a switch chain."""

    model_config = ConfigDict(frozen=True)

    burnin: int = Field(ge=0, description="Steps before the first retained sample")
    thin: int = Field(ge=1, description="Steps between retained samples")
    seed: int = Field(default=0, description="Seed of the chain's private generator")

    @classmethod
    def default_for(cls, m: int, n: int, seed: int = 0) -> "ChainConfig":
        """Default schedule: burn-in 20·mn·⌈ln mn⌉, thinning mn."""
        cells = m * n
        return cls(burnin=20 * cells * max(1, math.ceil(math.log(cells))), thin=cells, seed=seed)


# ===== EXPERIMENTS =====

class ExperimentConfig(BaseModel):
    """Everything a subcommand needs; written verbatim into the output metadata."""

    model_config = ConfigDict(frozen=True)

    name: ExperimentName = Field(description="Subcommand to run")
    family: Literal["lambda-k2k", "custom"] = Field(
        default="lambda-k2k", description="Λ^k_{2k} or explicit margins"
    )
    k: Optional[int] = Field(default=None, ge=1, description="Row/column sum for lambda-k2k")
    margins: Optional[MarginSpec] = Field(default=None, description="Margins for the custom family")
    dims: Optional[tuple[int, int]] = Field(default=None, description="Shape scanned by maxsds")
    samples: Optional[int] = Field(
        default=None, ge=1, description="Samples per experiment; verify sizes each suite itself when absent"
    )
    seed: int = Field(default=0, description="Base seed; sample i uses seed + i")
    eps: float = Field(default=0.1, ge=0.0, description="ε of the concentration threshold")
    c: float = Field(default=1.0, gt=0.0, description="Constant in front of the threshold")
    trials: int = Field(default=0, ge=0, description="Random subset pairs; 0 runs the exact scan")
    cap_factorial: int = Field(default=CAP_FACTORIAL, gt=0)
    cap_class: int = Field(default=CAP_CLASS, gt=0)
    max_dim: int = Field(default=3, ge=1, description="Largest side of exhaustive verify suites")
    burnin: Optional[int] = Field(default=None, ge=0)
    thin: Optional[int] = Field(default=None, ge=1)
    chains: int = Field(default=1, ge=1, description="Independent chains, seeds seed + chain")
    workers: int = Field(default=WORKERS, ge=1)
    out: Optional[Path] = Field(default=None, description="Output file; stdout when absent")
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _check_family(self) -> "ExperimentConfig":
        if self.k is not None and self.margins is not None:
            raise ValueError("--k and --margins are mutually exclusive")
        if self.name in ("verify", "maxsds"):
            return self
        if self.family == "custom" and self.margins is None:
            raise ValueError("the custom family needs --margins")
        if self.family == "lambda-k2k" and self.k is None and self.margins is None:
            raise ValueError("the lambda-k2k family needs --k")
        return self

    @property
    def sample_count(self) -> int:
        return DEFAULT_SAMPLES if self.samples is None else self.samples

    def resolved_margins(self) -> MarginSpec:
        """Margins to sample from: explicit ones, else Λ^k_{2k}."""
        if self.margins is not None:
            return self.margins
        assert self.k is not None
        return MarginSpec.regular(2 * self.k, self.k)

    def chain_for(self, m: int, n: int) -> ChainConfig:
        base = ChainConfig.default_for(m, n, self.seed)
        return ChainConfig(
            burnin=base.burnin if self.burnin is None else self.burnin,
            thin=base.thin if self.thin is None else self.thin,
            seed=self.seed,
        )


# ===== VERIFICATION =====

class SuiteResult(BaseModel):
    """Outcome of one oracle cross-check suite."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(description="Suite name")
    cases: int = Field(ge=0, description="Cases checked")
    failures: int = Field(default=0, ge=0, description="Cases where the two methods disagreed")
    counterexample: Optional[str] = Field(default=None, description="First disagreeing case")

    @property
    def passed(self) -> bool:
        return self.failures == 0
