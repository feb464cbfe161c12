"""Command-line front end: ``pybmsbalance <command> [options]``."""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .config import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
    EXIT_SUCCESS,
    EXIT_VERIFICATION_FAILED,
)
from .errors import BmsError, ConfigError, VerificationFailed
from .models import ModelSpec, RunMode, ScenarioConfig, read_scenario_mapping
from .runner import fig1_config, run_scenario

logger = logging.getLogger(__name__)

COMMANDS = {
    "steady": "solve for the stationary state",
    "verify": "check the balance relations and Gibbs stationarity",
    "sweep": "scan one scenario parameter over a grid",
    "fig1": "reproduce the two-lead population-inversion scenario",
    "occupation-scan": "tabulate bath occupations on a frequency grid",
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline."""
    parser = argparse.ArgumentParser(
        prog="pybmsbalance",
        description="Balance relations and stationary states of BMS master equations",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", type=Path, help="YAML scenario file")
        sub.add_argument("--out", type=Path, help="output directory")
        sub.add_argument(
            "--model", help="preset such as electronic:N=10,eps=1,U=1,T=0"
        )
        sub.add_argument("--tol", type=float, help="relative check tolerance")
        sub.add_argument(
            "-v", "--verbose", action="store_true", help="enable debug logging"
        )
        if name == "verify":
            sub.add_argument(
                "--inject-coefficients",
                type=Path,
                help="debug: replace the first bath's coefficients by this file",
            )
    return parser


def load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    """Merge the scenario file with the command-line overrides."""
    data: dict[str, Any] = {}
    if args.config is not None:
        data = read_scenario_mapping(args.config)
    elif args.command == RunMode.FIG1.value:
        data = fig1_config().model_dump(mode="json", by_alias=True)

    data["run"] = args.command
    if args.model is not None:
        data["model"] = ModelSpec.from_string(args.model)
    if args.out is not None:
        data.setdefault("output", {})["directory"] = str(args.out)
    if args.tol is not None:
        data.setdefault("solver", {})["tolerance"] = args.tol
    return ScenarioConfig.from_mapping(data)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_scenario(args)
        result = run_scenario(
            config, getattr(args, "inject_coefficients", None)
        )
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except VerificationFailed as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    except BmsError as e:
        logger.debug("Numerical failure", exc_info=True)
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE

    for path in result.files:
        print(path)
    return EXIT_SUCCESS
