# flake8: noqa F401
from .commands import COMMANDS, run
from .config import RunConfig, validate_config
from .exceptions import (
    EXIT_CHECK_FAILED,
    EXIT_INVALID_CONFIG,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    CliException,
    ConfigValidationError,
    MissingConfigSection,
)
from .main import build_parser, main
from .output import CommandResult, Table, emit_diagnostic, write_result
