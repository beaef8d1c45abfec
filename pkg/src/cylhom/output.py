"""Atomic JSON report writing."""

from __future__ import annotations

import json
import tempfile
from pathlib import Path
from typing import Any

from pydantic import BaseModel


def write_output(document: dict[str, Any], output_path: Path) -> None:
    """Create parent directories and write JSON output atomically."""
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path_str = tempfile.mkstemp(dir=output_path.parent, suffix=".tmp")
    tmp_path = Path(tmp_path_str)
    try:
        with open(fd, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, ensure_ascii=False)
            f.write("\n")
        tmp_path.replace(output_path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise


def write_report(report: BaseModel, output_path: Path) -> None:
    """Write a report model in its JSON form.

    The dumped document is validated against the report's own model first,
    so a file on disk always reads back with read_report.
    """
    data = report.model_dump(mode="json")
    type(report).model_validate(data)
    write_output(data, output_path)


def read_report[M: BaseModel](model: type[M], path: Path) -> M:
    """Load and re-validate a report written by write_report."""
    return model.model_validate_json(path.read_text(encoding="utf-8"))
