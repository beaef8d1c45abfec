"""Root logger setup: rich records on stderr, optionally mirrored to a rotating file."""

from __future__ import annotations

import logging
import sys
import warnings
from logging.handlers import RotatingFileHandler
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

_QUIETED = ("sympy",)
_FILE_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
_MAX_LOG_BYTES = 10 * 1024 * 1024


def _level_number(log_level: str) -> int:
    level = logging.getLevelNamesMapping().get(log_level.upper())
    if level is None:
        raise ValueError(f"Unknown log level {log_level!r}")
    return level


def _stderr_handler(level: int) -> RichHandler:
    handler = RichHandler(
        level=level,
        console=Console(file=sys.stderr),
        rich_tracebacks=True,
        show_path=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    return handler


def _file_handler(log_file: Path, level: int) -> RotatingFileHandler:
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(log_file, maxBytes=_MAX_LOG_BYTES, backupCount=3, encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(_FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    return handler


def setup_logging(log_level: str, log_file: Path | None = None) -> None:
    """Configure the root logger for one cylhom invocation.

    stdout is reserved for reports, so the console handler writes to stderr.
    Calling this again replaces the previous handlers.
    """
    level = _level_number(log_level)

    logging.captureWarnings(True)
    if level > logging.WARNING:
        warnings.filterwarnings("ignore")

    root = logging.getLogger()
    root.setLevel(level)
    root.handlers.clear()
    root.addHandler(_stderr_handler(level))
    if log_file is not None:
        root.addHandler(_file_handler(log_file, level))

    for name in _QUIETED:
        quiet = logging.getLogger(name)
        quiet.setLevel(level)
        quiet.handlers.clear()
