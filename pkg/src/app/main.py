"""Command-line entry point: `python -m app.main <command> ...` with src/ on PYTHONPATH."""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler

from app.commands import COMMANDS
from app.schemas import CliConfig
from config.settings import settings
from errors import QsaError

logger = logging.getLogger("qsa")


def parse_alpha(text: str) -> float:
    if text.strip() == "e":
        return math.e
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha must be a number or 'e', got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=parse_alpha, help="bias base A > 1 or 'e'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.add_argument("--threads", type=int, help="worker count for parallel stages (-1 = all cores)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("-q", "--quiet", action="store_true")


def _source(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--instance", type=Path, help="instance file")
    group.add_argument("--random", type=int, metavar="N", help="random N-city instance from --seed")
    group.add_argument("--example", action="store_true", help="the embedded four-city example")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsa", description="Exact simulation and resource analysis of "
                                                             "quantum simulated annealing on the TSP")
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="reproduce the four-city worked example")
    _common(demo)

    analyze = sub.add_parser("analyze", help="Gibbs summary, bounds, resources, CP and degeneracy")
    _common(analyze)
    _source(analyze)
    analyze.add_argument("--k", type=float, help="polynomial degree for the CP criterion")

    sample = sub.add_parser("sample", help="measure the post-selected state")
    _common(sample)
    _source(sample)
    sample.add_argument("--backend", choices=["dense", "tour", "auto"], default="auto")
    sample.add_argument("--shots", type=int, default=10000)
    sample.add_argument("--log", type=Path, help="write one record per shot")

    sweep = sub.add_parser("sweep", help="Z, P(optimal) and costs along an alpha grid")
    _common(sweep)
    _source(sweep)
    sweep.add_argument("--grid", help="comma-separated increasing alphas, e.g. e,4,8")
    sweep.add_argument("--k", type=float)

    cmp_ = sub.add_parser("compare", help="quantum protocol vs Metropolis baseline")
    _common(cmp_)
    _source(cmp_)
    cmp_.add_argument("--trials", type=int, default=2000, help="quantum trial budget per seed (0 = skip)")
    cmp_.add_argument("--steps", type=int, default=10000, help="Metropolis step budget per seed (0 = skip)")
    cmp_.add_argument("--seeds", type=int, default=30, help="number of consecutive seeds from --seed")
    cmp_.add_argument("--schedule", default="log:1", help="log:<c>, geo:<r> or const:<beta>")
    return parser


def to_config(args: argparse.Namespace) -> CliConfig:
    fields = {k: v for k, v in vars(args).items() if k in CliConfig.model_fields and v is not None}
    fields["verbosity"] = -1 if args.quiet else args.verbose
    return CliConfig(**fields)


def setup_logging(verbosity: int) -> None:
    if verbosity < 0:
        level = logging.WARNING
    elif verbosity > 0:
        level = logging.DEBUG
    else:
        level = settings.log_level
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_time=False, show_path=False)],
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = to_config(args)
    setup_logging(cfg.verbosity)
    if cfg.threads is not None:
        settings.threads = cfg.threads
    try:
        return COMMANDS[cfg.command](cfg)
    except QsaError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
