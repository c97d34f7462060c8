"""Command-line entry point: ``defsets <subcommand> [flags]``.

Exit codes: 0 on success, 1 when a verification check fails, 2 on bad input.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError
from rich.console import Console

from defining_sets.config import CAP_CLASS, CAP_FACTORIAL, WORKERS
from defining_sets.errors import DefiningSetsError
from defining_sets.experiments import RUNNERS, metadata, run_experiment
from defining_sets.run_logger import configure_run_logging
from defining_sets.state_experiment import ExperimentConfig
from defining_sets.state_matrix import MarginSpec

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_BAD_INPUT = 2

console = Console()
err_console = Console(stderr=True)


def parse_margins(value: str) -> MarginSpec:
    """Read margins from inline JSON or from a JSON file."""
    path = Path(value)
    text = path.read_text() if not value.lstrip().startswith("{") and path.is_file() else value
    try:
        return MarginSpec.from_json(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise DefiningSetsError(f"cannot read margins from {value!r}: {e}") from e


def parse_dims(value: str) -> tuple[int, int]:
    try:
        m, n = (int(part) for part in value.split(","))
    except ValueError as e:
        raise DefiningSetsError(f"--dims expects m,n, got {value!r}") from e
    return m, n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Base seed; sample i uses seed + i")
    common.add_argument("--samples", type=int, default=None, help="Number of samples (verify: full suite sizes)")
    common.add_argument("--margins", type=str, default=None, help="Margins as JSON or a JSON file")
    common.add_argument("--family", choices=["lambda-k2k", "custom"], default=None)
    common.add_argument("--k", type=int, default=None, help="Row/column sum of Λ^k_{2k}")
    common.add_argument("--eps", type=float, default=0.1)
    common.add_argument("--c", type=float, default=1.0)
    common.add_argument("--out", type=Path, default=None, help="Output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--cap-factorial", type=int, default=CAP_FACTORIAL)
    common.add_argument("--cap-class", type=int, default=CAP_CLASS)
    common.add_argument("--trials", type=int, default=0, help="Sampled discrepancy pairs; 0 scans exactly")
    common.add_argument("--workers", type=int, default=WORKERS)
    common.add_argument("--max-dim", type=int, default=3, help="Largest side of exhaustive verify suites")
    common.add_argument("--dims", type=str, default=None, help="Shape m,n scanned by maxsds")
    common.add_argument("--burnin", type=int, default=None)
    common.add_argument("--thin", type=int, default=None)
    common.add_argument("--chains", type=int, default=1, help="Independent switch chains, seeds seed + chain")
    common.add_argument("--log-dir", type=Path, default=None, help="Run log directory")
    common.add_argument("--verbose", action="store_true", help="Echo run log records to stderr")

    parser = argparse.ArgumentParser(
        prog="defsets", description="Defining sets of fixed-margin binary matrices"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, runner in RUNNERS.items():
        sub.add_parser(name, parents=[common], help=(runner.__doc__ or "").splitlines()[0])
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    margins = parse_margins(args.margins) if args.margins else None
    family = args.family or ("custom" if margins is not None and args.k is None else "lambda-k2k")
    return ExperimentConfig(
        name=args.command,
        family=family,
        k=args.k,
        margins=margins,
        dims=parse_dims(args.dims) if args.dims else None,
        samples=args.samples,
        seed=args.seed,
        eps=args.eps,
        c=args.c,
        trials=args.trials,
        cap_factorial=args.cap_factorial,
        cap_class=args.cap_class,
        max_dim=args.max_dim,
        burnin=args.burnin,
        thin=args.thin,
        chains=args.chains,
        workers=args.workers,
        out=args.out,
        format=args.format,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_run_logging(args.log_dir, console=args.verbose)
        config = config_from_args(args)
        output, rendered = run_experiment(config)
        if config.out is None:
            sys.stdout.write(rendered)
        else:
            config.out.parent.mkdir(parents=True, exist_ok=True)
            with open(config.out, "w", newline="") as f:
                f.write(rendered)
            if config.format == "csv":
                sidecar = config.out.with_name(config.out.name + ".meta.json")
                sidecar.write_text(json.dumps(metadata(config, output.extra.get("sampler")), indent=2) + "\n")
    except (DefiningSetsError, ValidationError, OSError) as e:
        err_console.print(f"[error] {e}", markup=False)
        return EXIT_BAD_INPUT

    if output.failures:
        err_console.print(f"[{config.name}] FAIL ({output.failures} failing rows)", markup=False)
        return EXIT_VERIFICATION_FAILED
    if config.name == "verify":
        console.print("all oracle suites passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
