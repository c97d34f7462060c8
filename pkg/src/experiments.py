"""Experiment runners behind the command-line subcommands.

Each runner takes a validated :class:`ExperimentConfig` and returns an
:class:`ExperimentOutput`: the table rows (already formatted, so CSV output is
byte-stable across runs), the number of rows that failed a check, and any
extra JSON sections. Sample ``i`` runs its randomized steps with seed
``config.seed + i``, and rows are ordered by sample index whatever the worker
count. See :func:`draw_members` for how the members themselves are seeded.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from defining_sets.bounds import conditional_failure_log_bound, density_hypotheses_check, failure_probability_bound
from defining_sets.config import RNG_ALGORITHM
from defining_sets.core import circulant_member, construct_member, gale_ryser_feasible
from defining_sets.counting import class_size, estimate_count_leading, leading_ratio_log
from defining_sets.defining import (
    critical_complement_is_defining,
    is_critical,
    maxsds_exact,
    minimalize_to_critical,
    sds,
    trivial_defining_bound,
)
from defining_sets.discrepancy import certificate_for, concentration_threshold, max_discrepancy
from defining_sets.errors import DomainError, EmptyClassError
from defining_sets.parallel import make_rng, ordered_map
from defining_sets.run_logger import log_experiment_end, log_experiment_start, log_sample_result
from defining_sets.sampling import run_chains, sample_uniform_exact
from defining_sets.state_experiment import ExperimentConfig
from defining_sets.state_matrix import BinaryMatrix, MarginSpec, PartialMatrix
from defining_sets.verification import run_all_suites

logger = logging.getLogger(__name__)

# Classes on at most this many cells are sampled exactly when they fit the class cap
EXACT_SAMPLING_CELLS = 64

ERROR_FACTOR_NOTE = "unknown multiplicative exp(-O((mn)^(2eps)))"

Row = dict[str, Any]


@dataclass
class ExperimentOutput:
    """Rows of one experiment plus the sections only JSON output carries."""

    columns: list[str]
    rows: list[Row]
    failures: int = 0
    extra: dict = field(default_factory=dict)


# ===== FORMATTING =====

def format_fraction(value: Fraction, places: int = 12) -> str:
    """Non-negative rational rounded half up to ``places`` decimals, from exact integers."""
    scale = 10**places
    q = (2 * value.numerator * scale + value.denominator) // (2 * value.denominator)
    return f"{q // scale}.{q % scale:0{places}d}"


def format_float(value: float) -> str:
    return f"{value:.12f}"


def to_csv(output: ExperimentOutput) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=output.columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(output.rows)
    return buffer.getvalue()


def metadata(config: ExperimentConfig, sampler: Optional[str] = None) -> dict:
    """Full config plus the RNG identifier, written next to every output."""
    meta = {"config": config.model_dump(mode="json"), "rng": RNG_ALGORITHM, "log_base": "natural"}
    if sampler is not None:
        meta["sampler"] = sampler
    return meta


def to_json(config: ExperimentConfig, output: ExperimentOutput, sampler: Optional[str] = None) -> str:
    document = {"metadata": metadata(config, sampler), "results": output.rows, **output.extra}
    return json.dumps(document, indent=2) + "\n"


# ===== SAMPLING =====

def sampler_name(config: ExperimentConfig, margins: MarginSpec) -> str:
    """``"exact"`` when the class is small enough to rank into, else ``"switch-chain"``."""
    if margins.m * margins.n <= EXACT_SAMPLING_CELLS and class_size(margins) <= config.cap_class:
        return "exact"
    return "switch-chain"


def chain_start(margins: MarginSpec) -> BinaryMatrix:
    s, t = margins.s, margins.t
    if margins.m == margins.n and len(set(s)) == 1 and set(s) == set(t):
        return circulant_member(margins.n, s[0])
    return construct_member(margins)


def draw_members(config: ExperimentConfig, margins: MarginSpec, sampler: str) -> list[BinaryMatrix]:
    """Draw the experiment's members of A(s,t), ordered by sample index.

    The exact sampler gives sample i seed ``config.seed + i``. The switch chain
    spreads the samples round-robin over ``config.chains`` chains, chain c
    seeded ``config.seed + c``.
    """
    if sampler == "exact":
        return [sample_uniform_exact(margins, config.seed + i, config.cap_class) for i in range(config.sample_count)]
    return run_chains(
        chain_start(margins),
        config.chain_for(margins.m, margins.n),
        config.sample_count,
        config.chains,
        config.workers,
    )


_IDENTITY = ("m", "n", "k", "seed", "sample")


def _base_row(config: ExperimentConfig, margins: MarginSpec, sample: int) -> Row:
    return {
        "m": margins.m,
        "n": margins.n,
        "k": config.k if config.k is not None else "",
        "seed": config.seed + sample,
        "sample": sample,
    }


def _fan_out(
    fn: Callable[[tuple[ExperimentConfig, MarginSpec, BinaryMatrix, int]], Row],
    config: ExperimentConfig,
    margins: MarginSpec,
) -> tuple[list[Row], str]:
    if not gale_ryser_feasible(margins):
        raise EmptyClassError(f"no matrix has margins {margins.to_json()}")
    sampler = sampler_name(config, margins)
    members = draw_members(config, margins, sampler)
    tasks = [(config, margins, matrix, i) for i, matrix in enumerate(members)]
    rows = ordered_map(fn, tasks, config.workers)
    for i, row in enumerate(rows):
        log_sample_result(config.name, i, config.seed + i, **{k: v for k, v in row.items() if k not in _IDENTITY})
    return rows, sampler


# ===== RUNNERS =====

SDS_COLUMNS = ["m", "n", "k", "seed", "sample", "sds", "exact", "lambda_mn", "ratio", "trivial_bound", "certificate"]


def _sds_row(task: tuple[ExperimentConfig, MarginSpec, BinaryMatrix, int]) -> Row:
    config, margins, matrix, i = task
    seed = config.seed + i
    result = sds(matrix, config.cap_factorial, seed)
    total = matrix.total_ones
    row = _base_row(config, margins, i)
    row.update(
        sds=result.value,
        exact=str(result.exact).lower(),
        lambda_mn=total,
        ratio=format_fraction(Fraction(result.value, total)) if total else "",
        trivial_bound=trivial_defining_bound(matrix),
        certificate=certificate_for(matrix, max_discrepancy(matrix).abs_scaled)
        if min(matrix.m, matrix.n) <= 16
        else "",
    )
    return row


def run_sds(config: ExperimentConfig) -> ExperimentOutput:
    """Sample matrices and report sds against λmn."""
    rows, sampler = _fan_out(_sds_row, config, config.resolved_margins())
    failures = sum(1 for row in rows if row["sds"] > row["trivial_bound"])
    return ExperimentOutput(SDS_COLUMNS, rows, failures, {"sampler": sampler})


DISCREPANCY_COLUMNS = ["m", "n", "k", "seed", "sample", "maxdelta_num", "maxdelta_den", "threshold", "ratio"]


def _discrepancy_row(task: tuple[ExperimentConfig, MarginSpec, BinaryMatrix, int]) -> Row:
    config, margins, matrix, i = task
    seed = config.seed + i
    mode = "sampled" if config.trials else "exact"
    result = max_discrepancy(matrix, mode=mode, trials=config.trials, seed=seed)
    delta = abs(result.value.as_fraction)
    threshold = concentration_threshold(matrix.m, matrix.n, config.c, config.eps)
    row = _base_row(config, margins, i)
    row.update(
        maxdelta_num=delta.numerator,
        maxdelta_den=delta.denominator,
        threshold=format_float(threshold),
        ratio=format_float(float(delta) / threshold),
    )
    return row


def run_discrepancy(config: ExperimentConfig) -> ExperimentOutput:
    """Largest subarray discrepancy of sampled matrices against the concentration threshold."""
    rows, sampler = _fan_out(_discrepancy_row, config, config.resolved_margins())
    above = sum(1 for row in rows if float(row["ratio"]) > 1.0)
    return ExperimentOutput(
        DISCREPANCY_COLUMNS,
        rows,
        0,
        {"sampler": sampler, "within_threshold": len(rows) - above, "above_threshold": above},
    )


CRITICAL_COLUMNS = ["m", "n", "k", "seed", "sample", "critical_size", "is_critical", "complement_defining", "cells"]


def _critical_row(task: tuple[ExperimentConfig, MarginSpec, BinaryMatrix, int]) -> Row:
    config, margins, matrix, i = task
    seed = config.seed + i
    cells = [(p, q) for p in range(matrix.m) for q in range(matrix.n)]
    order = [cells[c] for c in make_rng(seed).permutation(len(cells)).tolist()]
    critical = minimalize_to_critical(PartialMatrix.from_matrix(matrix), matrix, order)
    row = _base_row(config, margins, i)
    row.update(
        critical_size=critical.size,
        is_critical=str(is_critical(critical, matrix)).lower(),
        complement_defining=str(critical_complement_is_defining(critical, matrix)).lower(),
        cells=matrix.m * matrix.n,
    )
    return row


def run_critical(config: ExperimentConfig) -> ExperimentOutput:
    """Minimalize each sampled full matrix to a critical set and check its complement."""
    rows, sampler = _fan_out(_critical_row, config, config.resolved_margins())
    failures = sum(
        1 for row in rows if row["is_critical"] != "true" or row["complement_defining"] != "true"
    )
    return ExperimentOutput(CRITICAL_COLUMNS, rows, failures, {"sampler": sampler})


COUNT_COLUMNS = ["m", "n", "k", "exact", "log_estimate", "ratio_log", "degenerate"]


def run_count(config: ExperimentConfig) -> ExperimentOutput:
    """Exact class size against the leading-term estimate."""
    margins = config.resolved_margins()
    exact = class_size(margins, config.workers)
    estimate = estimate_count_leading(margins)
    row: Row = {
        "m": margins.m,
        "n": margins.n,
        "k": config.k if config.k is not None else "",
        "exact": str(exact),
        "log_estimate": estimate.log_value,
        "ratio_log": leading_ratio_log(margins, exact) if exact else None,
        "degenerate": str(estimate.degenerate).lower(),
    }
    return ExperimentOutput(COUNT_COLUMNS, [row], 0, {"error_factor": ERROR_FACTOR_NOTE})


BOUNDS_COLUMNS = ["name", "holds", "lhs", "rhs"]


def run_bounds(config: ExperimentConfig) -> ExperimentOutput:
    """Hypothesis report and failure-probability bounds for the margins."""
    margins = config.resolved_margins()
    report = density_hypotheses_check(margins, config.eps)
    rows: list[Row] = [
        {"name": c.name, "holds": str(c.holds).lower(), "lhs": c.lhs, "rhs": c.rhs} for c in report.checks
    ]
    extra: dict = {"hypotheses": report.to_json()}
    try:
        bound = failure_probability_bound(margins.m, margins.n, margins.density, config.c, config.eps)
    except DomainError as e:
        extra["failure_bound"] = {"error": str(e)}
    else:
        extra["failure_bound"] = bound.model_dump()
        rows.append(
            {"name": "failure_probability", "holds": str(bound.total < 1).lower(), "lhs": bound.total, "rhs": 1.0}
        )
        method = "exact" if margins.m * margins.n <= EXACT_SAMPLING_CELLS else "leading"
        log_bound = conditional_failure_log_bound(margins, config.c, config.eps, method)
        extra["conditional_log_bound"] = {"value": log_bound, "method": method}
        rows.append({"name": "conditional_failure_log", "holds": str(log_bound < 0).lower(), "lhs": log_bound, "rhs": 0.0})
    return ExperimentOutput(BOUNDS_COLUMNS, rows, 0, extra)


MAXSDS_COLUMNS = ["m", "n", "s", "t", "total", "density", "class_size", "maxsds"]


def _sorted_classes(m: int, n: int) -> list[MarginSpec]:
    """Every feasible class of m×n matrices with non-increasing row and column sums."""

    def non_increasing(length: int, top: int) -> list[tuple[int, ...]]:
        if length == 0:
            return [()]
        return [(v,) + rest for v in range(top, -1, -1) for rest in non_increasing(length - 1, v)]

    classes = []
    for s in non_increasing(m, n):
        for t in non_increasing(n, m):
            if sum(s) == sum(t) and gale_ryser_feasible(MarginSpec(s=s, t=t)):
                classes.append(MarginSpec(s=s, t=t))
    return sorted(classes, key=lambda ms: (ms.total, ms.s, ms.t))


def run_maxsds(config: ExperimentConfig) -> ExperimentOutput:
    """maxsds of one class, or of every sorted class of a shape grouped by density."""
    if config.margins is not None:
        classes = [config.margins]
    elif config.dims is not None:
        classes = _sorted_classes(*config.dims)
    else:
        classes = [config.resolved_margins()]
    rows: list[Row] = []
    by_density: dict[str, int] = {}
    for margins in classes:
        value = maxsds_exact(margins, config.cap_class, config.cap_factorial)
        density = margins.density
        rows.append(
            {
                "m": margins.m,
                "n": margins.n,
                "s": " ".join(map(str, margins.s)),
                "t": " ".join(map(str, margins.t)),
                "total": margins.total,
                "density": f"{density.numerator}/{density.denominator}",
                "class_size": class_size(margins),
                "maxsds": value,
            }
        )
        key = str(rows[-1]["density"])
        by_density[key] = max(by_density.get(key, 0), value)
    return ExperimentOutput(MAXSDS_COLUMNS, rows, 0, {"maxsds_by_density": by_density})


VERIFY_COLUMNS = ["suite", "cases", "failures", "counterexample"]


def run_verify(config: ExperimentConfig) -> ExperimentOutput:
    """Every oracle cross-check suite; any disagreement is a failure."""
    results = run_all_suites(config.max_dim, config.samples, config.seed)
    rows: list[Row] = [
        {"suite": r.name, "cases": r.cases, "failures": r.failures, "counterexample": r.counterexample or ""}
        for r in results
    ]
    return ExperimentOutput(VERIFY_COLUMNS, rows, sum(1 for r in results if not r.passed))


RUNNERS: dict[str, Callable[[ExperimentConfig], ExperimentOutput]] = {
    "sds": run_sds,
    "count": run_count,
    "discrepancy": run_discrepancy,
    "critical": run_critical,
    "verify": run_verify,
    "bounds": run_bounds,
    "maxsds": run_maxsds,
}


def run_experiment(config: ExperimentConfig) -> tuple[ExperimentOutput, str]:
    """Run the configured subcommand and render its output.

    Returns:
        The output record and its rendering in ``config.format``
    """
    samples = config.samples if config.name == "verify" else config.sample_count
    log_experiment_start(config.name, config.seed, samples, RNG_ALGORITHM)
    output = RUNNERS[config.name](config)
    log_experiment_end(config.name, len(output.rows), output.failures)
    sampler = output.extra.get("sampler")
    if config.format == "json":
        return output, to_json(config, output, sampler)
    return output, to_csv(output)

