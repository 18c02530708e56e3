"""annulus-lab command line: run one experiment config and write its results."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .commands import ExperimentConfig, run
from .constants import DEFAULT_THREADS, THREADS_ENV
from .errors import AnnulusLabError, ConfigError
from .models.save import RUNS_DIR, write_result
from .plots import emit_plot_data
from .states import Command, PlotKind

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annulus-lab",
        description="Abstract angles, monotone twist maps and their periodic orbits.",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", type=Path, required=True, help="experiment JSON file")
    parser.add_argument("--out", type=Path, default=None, help=f"output directory (default: {RUNS_DIR})")
    parser.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    parser.add_argument(
        "--threads",
        type=int,
        default=DEFAULT_THREADS,
        help=f"sweep workers; {THREADS_ENV} takes precedence",
    )
    parser.add_argument(
        "--plot",
        action="append",
        default=[],
        choices=[k.value for k in PlotKind],
        help="also write CSV plot data (repeatable)",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _threads(flag: int) -> int:
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return flag
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV}={value!r} is not an integer") from exc


def _load_config(path: Path, command: str, seed: int | None) -> ExperimentConfig:
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = ExperimentConfig.from_dict(raw, command)
    if seed is not None:
        cfg.seed = seed
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    out_dir = args.out if args.out is not None else RUNS_DIR

    try:
        cfg = _load_config(args.config, args.command, args.seed)
        threads = _threads(args.threads)
    except ConfigError as exc:
        logger.error("%s", exc)
        document = {
            "inputs": {"command": args.command, "config": str(args.config)},
            "version": __version__,
            "output": None,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        write_result(document, out_dir)
        return exc.exit_code

    document, code = run(cfg, threads)
    path = write_result(document, out_dir)
    logger.info("wrote %s", path)
    for kind in args.plot:
        try:
            emit_plot_data(document, kind, out_dir)
        except AnnulusLabError as exc:
            logger.error("%s", exc)
            code = code or exc.exit_code
    return code


if __name__ == "__main__":
    raise SystemExit(main())
