"""Utilities for reading run logs back in notebooks and scripts."""

from collections import Counter
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.table import Table

from defining_sets.config import get_log_dir
from defining_sets.run_logger import LOG_FILE_NAME

console = Console(stderr=True)


def get_log_path(log_dir: Optional[Path] = None) -> Path:
    """Get the run log file path."""
    return (log_dir or get_log_dir()) / LOG_FILE_NAME


def read_logs(limit: Optional[int] = None, log_dir: Optional[Path] = None) -> List[str]:
    """Read all or recent run log lines.

    Args:
        limit: Maximum number of lines to return (None = all)
        log_dir: Directory holding the log

    Returns:
        List of log lines
    """
    log_path = get_log_path(log_dir)
    if not log_path.exists():
        return []

    with open(log_path, 'r') as f:
        lines = f.readlines()

    if limit:
        return lines[-limit:]
    return lines


def get_suite_breakdown(lines: List[str]) -> dict:
    """Count PASS/FAIL records per suite name."""
    outcomes = []
    for line in lines:
        if "[SUITE]" in line and "suite=" in line:
            status = "FAIL" if "[SUITE] FAIL" in line else "PASS"
            start = line.find("suite=") + 6
            end = line.find(" |", start)
            if end > start:
                outcomes.append((line[start:end], status))
    return dict(Counter(outcomes))


def get_run_summary(log_dir: Optional[Path] = None) -> dict:
    """Get a summary of everything recorded in the run log.

    Returns:
        Dictionary with run statistics
    """
    lines = read_logs(log_dir=log_dir)

    if not lines:
        return {}

    return {
        "total_lines": len(lines),
        "experiments": sum(1 for line in lines if "[EXPERIMENT] START" in line),
        "samples": sum(1 for line in lines if "[SAMPLE]" in line),
        "solver_fallbacks": sum(1 for line in lines if "[SOLVER] FALLBACK" in line),
        "chains": sum(1 for line in lines if "[CHAIN]" in line),
        "suite_failures": sum(1 for line in lines if "[SUITE] FAIL" in line),
        "suites": get_suite_breakdown(lines),
        "log_file": str(get_log_path(log_dir)),
    }


def print_summary(log_dir: Optional[Path] = None) -> None:
    """Print a summary table of the run log."""
    summary = get_run_summary(log_dir)

    if not summary:
        console.print("No run logs found yet")
        return

    table = Table(title="Run Log Summary")
    table.add_column("Metric")
    table.add_column("Count", justify="right")
    for key in ("experiments", "samples", "solver_fallbacks", "chains", "suite_failures", "total_lines"):
        table.add_row(key.replace("_", " ").title(), str(summary[key]))
    console.print(table)
    console.print(f"Log file: {summary['log_file']}")


def print_failures(log_dir: Optional[Path] = None) -> None:
    """Print every failed suite and every ERROR record."""
    lines = read_logs(log_dir=log_dir)
    errors = [line for line in lines if "ERROR" in line]

    if not errors:
        console.print("No failures found in logs")
        return

    console.rule(f"Failures ({len(errors)} total)")
    for line in errors:
        console.print(line.rstrip(), markup=False)
    console.rule()
