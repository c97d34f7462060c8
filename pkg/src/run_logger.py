"""Run logging for experiments, samples, solvers and verification suites.

This module provides centralized logging for every experiment run so that
seeds, solver fallbacks and failed oracle checks can be traced afterwards.
Handlers are attached by :func:`configure_run_logging`; until then records
only reach whatever the host application configured.
"""

import logging
from pathlib import Path
from typing import Optional

from defining_sets.config import get_log_dir

logger = logging.getLogger("defining_sets")

LOG_FILE_NAME = "runs.log"


def configure_run_logging(log_dir: Optional[Path] = None, console: bool = True) -> Path:
    """Attach the file and console handlers to the run logger.

    Args:
        log_dir: Directory for ``runs.log``; defaults to ``$DEFSETS_LOG_DIR`` or ``./logs``
        console: Also echo records to stderr

    Returns:
        Path of the log file
    """
    log_dir = log_dir or get_log_dir()
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / LOG_FILE_NAME

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Add handlers once per log file
    if not any(
        isinstance(h, logging.FileHandler) and Path(h.baseFilename) == log_file.resolve()
        for h in logger.handlers
    ):
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if console and not any(type(h) is logging.StreamHandler for h in logger.handlers):
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.INFO)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    logger.setLevel(logging.INFO)
    return log_file


def log_experiment_start(name: str, seed: int, samples: Optional[int], rng: str):
    """Log the start of an experiment.

    Args:
        name: Subcommand name
        seed: Base seed
        samples: Number of samples requested, None for suite-sized verification
        rng: RNG algorithm identifier
    """
    logger.info(f"[EXPERIMENT] START | name={name} | seed={seed} | samples={samples} | rng={rng}")


def log_experiment_end(name: str, rows: int, failures: int = 0):
    """Log the end of an experiment.

    Args:
        name: Subcommand name
        rows: Output rows written
        failures: Rows that failed a check
    """
    level = logging.ERROR if failures else logging.INFO
    logger.log(level, f"[EXPERIMENT] END | name={name} | rows={rows} | failures={failures}")


def log_sample_result(name: str, sample: int, seed: int, **values):
    """Log one sample's outcome.

    Args:
        name: Subcommand name
        sample: Sample index
        seed: Derived seed of the sample
        values: Reported quantities
    """
    extra = " | ".join(f"{k}={v}" for k, v in values.items())
    logger.info(f"[SAMPLE] {name.upper()} | sample={sample} | seed={seed} | {extra}")


def log_solver_fallback(m: int, n: int, reason: str, rng: str, seed: int):
    """Log that the exact sds solver fell back to local search.

    Args:
        m: Row count
        n: Column count
        reason: Why the exact solver refused
        rng: RNG algorithm used by the heuristic
        seed: Heuristic seed
    """
    logger.warning(
        f"[SOLVER] FALLBACK | shape={m}x{n} | reason={reason} | rng={rng} | seed={seed}"
    )


def log_chain(steps: int, active: int, seed: int):
    """Log a finished switch-chain run.

    Args:
        steps: Steps performed
        active: Steps that flipped a checkerboard
        seed: Chain seed
    """
    logger.info(f"[CHAIN] DONE | steps={steps} | active={active} | seed={seed}")


def log_suite_result(suite: str, cases: int, failures: int, counterexample: Optional[str] = None):
    """Log the outcome of an oracle cross-check suite.

    Args:
        suite: Suite name
        cases: Cases checked
        failures: Cases where the two methods disagreed
        counterexample: First disagreeing case, if any
    """
    if failures:
        logger.error(
            f"[SUITE] FAIL | suite={suite} | cases={cases} | failures={failures} | "
            f"first='{counterexample}'"
        )
    else:
        logger.info(f"[SUITE] PASS | suite={suite} | cases={cases}")
