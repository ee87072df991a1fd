import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import numpy as np

from .exceptions import EXIT_OK

logger = logging.getLogger(__name__)

CSV_FORMAT = "%.17g"


@dataclass(frozen=True)
class Table:
    header: List[str]
    rows: np.ndarray

    def to_csv(self) -> str:
        buffer = io.StringIO()
        np.savetxt(
            buffer,
            np.atleast_2d(self.rows),
            fmt=CSV_FORMAT,
            delimiter=",",
            header=",".join(self.header),
            comments="",
        )
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {"header": self.header, "rows": np.atleast_2d(self.rows).tolist()}


@dataclass
class CommandResult:
    """
    Outcome of a command: exit code, JSON report and named tables
    """

    report: Dict[str, Any]
    tables: Dict[str, Table] = field(default_factory=dict)
    exit_code: int = EXIT_OK


def _default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps(data: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(data, sort_keys=True, indent=indent, default=_default)


def write_result(
    result: CommandResult,
    directory: Optional[Path],
    output_format: str = "csv",
    stream: TextIO = sys.stdout,
) -> List[Path]:
    """
    Writes ``report.json`` and one file per table into ``directory``; without a
    directory the report goes to ``stream``

    :return: written paths
    """
    if directory is None:
        stream.write(dumps(result.report) + "\n")
        return []
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    report_path = directory / "report.json"
    report_path.write_text(dumps(result.report) + "\n")
    written.append(report_path)
    for name, table in sorted(result.tables.items()):
        if output_format == "json":
            path = directory / f"{name}.json"
            path.write_text(dumps(table.to_dict()) + "\n")
        else:
            path = directory / f"{name}.csv"
            path.write_text(table.to_csv())
        written.append(path)
    logger.info("Wrote %s", ", ".join(str(path) for path in written))
    return written


def emit_diagnostic(
    error: BaseException, exit_code: int, stream: TextIO = sys.stderr
) -> None:
    """
    Single-line JSON description of a failed run
    """
    diagnostic: Dict[str, Any] = {
        "error": type(error).__name__,
        "message": str(error),
        "exit_code": exit_code,
    }
    for attribute in ("path", "exit_time", "residual", "iterations", "distance"):
        value = getattr(error, attribute, None)
        if value is not None:
            diagnostic[attribute] = value
    stream.write(dumps(diagnostic, indent=None) + "\n")
