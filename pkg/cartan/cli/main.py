import argparse
import logging
import sys
from pathlib import Path
from typing import List, NoReturn, Optional, Sequence

import numpy as np

from ..compat import Condition, ConditionNotApplicable
from .commands import run
from .config import RunConfig
from .exceptions import (
    EXIT_INVALID_CONFIG,
    EXIT_NUMERICAL_FAILURE,
    CliException,
    ConfigValidationError,
)
from .output import emit_diagnostic, write_result
from .schema import COMMANDS

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise ConfigValidationError(message, "argv")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="cah-cli",
        description="Developments, variations and reconstructed maps of Riemannian "
        "submanifold data",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="Directory for the report and the tables")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int, help="Cap on worker threads")
    parser.add_argument("--tolerance", type=float)
    parser.add_argument(
        "--conditions", help="Comma separated checks, e.g. gauss,codazzi,ricci"
    )
    parser.add_argument("--format", choices=("csv", "json"), dest="output_format")
    parser.add_argument("--verbose", "-v", action="count", default=0)
    return parser


def _conditions(value: Optional[str]) -> Optional[List[Condition]]:
    if value is None:
        return None
    try:
        return Condition.parse(value)
    except ValueError as exc:
        raise ConfigValidationError(f"Unknown condition in '{value}'", "conditions") from exc


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    :return: 0 on success, 1 when a hypothesis check fails, 2 for an invalid
        configuration, 3 for numerical failures
    """
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        if args.threads is not None and args.threads < 1:
            raise ConfigValidationError("--threads must be at least 1", "threads")
        config = RunConfig.load(args.command, args.config).with_overrides(
            seed=args.seed,
            threads=args.threads,
            tolerance=args.tolerance,
            conditions=_conditions(args.conditions),
            output_directory=Path(args.out) if args.out else None,
            output_format=args.output_format,
        )
        result = run(config)
        write_result(result, config.output_directory, config.output_format)
        return result.exit_code
    except CliException as exc:
        emit_diagnostic(exc, exc.exit_code)
        return exc.exit_code
    except ConditionNotApplicable as exc:
        emit_diagnostic(exc, EXIT_INVALID_CONFIG)
        return EXIT_INVALID_CONFIG
    except (ValueError, np.linalg.LinAlgError) as exc:
        logger.debug("Run failed", exc_info=True)
        emit_diagnostic(exc, EXIT_NUMERICAL_FAILURE)
        return EXIT_NUMERICAL_FAILURE
