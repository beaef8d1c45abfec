"""Configuration loading, merging, and validation."""

from __future__ import annotations

import os
import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli_w

from cylhom.buildings import Budgets, parse_budget_items
from cylhom.chain import Coefficients, Variant
from cylhom.rationals import parse_degree_range

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
FORMATS = ("text", "json")
DEFAULT_CONFIG_NAME = "cylhom.toml"


@dataclass(frozen=True)
class CylhomConfig:
    """Immutable settings for a cylhom invocation."""

    log_level: str = "WARNING"
    log_file: Path | None = None
    format: str = "text"
    k_max: int = 5
    degrees: tuple[int, int] = (0, 20)
    variant: Variant = Variant.MINUS
    coefficients: Coefficients = Coefficients.Q
    workers: int = 1
    budgets: Budgets = field(default_factory=Budgets)


_DEFAULTS: dict[str, Any] = {
    "log_level": "WARNING",
    "format": "text",
    "k_max": 5,
    "degrees": "0..20",
    "variant": "minus",
    "coefficients": "Q",
    "workers": 1,
}


def load_config(path: Path) -> dict[str, Any]:
    """Read a TOML config file and return a dict."""
    with path.open("rb") as f:
        return tomllib.load(f)


def merge_config(
    file_config: dict[str, Any],
    cli_overrides: dict[str, Any],
) -> CylhomConfig:
    """Merge defaults, file config, and CLI overrides into a validated config.

    Priority: defaults < file config < CLI overrides.
    The log level falls back to the CYLHOM_LOG_LEVEL environment variable.
    ``cli_overrides["budgets"]`` is a "levels=..,cover=.." string merged key by key
    over the file's [budgets] table.
    """
    overrides = {k: v for k, v in cli_overrides.items() if v is not None}
    file_values = {k: v for k, v in file_config.items() if v is not None and k != "budgets"}

    merged: dict[str, Any] = {**_DEFAULTS}
    merged.update(file_values)
    merged.update({k: v for k, v in overrides.items() if k != "budgets"})

    if "log_level" not in file_values and "log_level" not in overrides:
        env_level = os.environ.get("CYLHOM_LOG_LEVEL", "")
        if env_level:
            merged["log_level"] = env_level

    budgets_section = file_config.get("budgets", {})
    return _validate(merged, budgets_section, overrides.get("budgets"))


def _validate(
    merged: dict[str, Any],
    budgets_section: Any,
    budgets_override: str | None,
) -> CylhomConfig:
    """Validate the merged config and return a CylhomConfig."""
    errors: list[str] = []

    log_level = str(merged["log_level"]).upper()
    if log_level not in LOG_LEVELS:
        errors.append(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {merged['log_level']!r}")

    fmt = merged["format"]
    if fmt not in FORMATS:
        errors.append(f"format must be 'text' or 'json', got {fmt!r}")

    k_max = merged["k_max"]
    if not isinstance(k_max, int) or isinstance(k_max, bool) or k_max < 1:
        errors.append(f"k_max must be a positive integer, got {k_max!r}")

    workers = merged["workers"]
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        errors.append(f"workers must be a positive integer, got {workers!r}")

    degrees: tuple[int, int] = (0, 20)
    try:
        degrees = parse_degree_range(str(merged["degrees"]))
    except ValueError as e:
        errors.append(f"degrees: {e}")

    variant = Variant.MINUS
    try:
        variant = Variant(merged["variant"])
    except ValueError:
        errors.append(f"variant must be 'minus' or 'plus', got {merged['variant']!r}")

    coefficients = Coefficients.Q
    try:
        coefficients = Coefficients(merged["coefficients"])
    except ValueError:
        errors.append(f"coefficients must be Q, Z or Z2, got {merged['coefficients']!r}")

    budgets = Budgets()
    if not isinstance(budgets_section, dict):
        errors.append("[budgets] must be a table")
        budgets_section = {}
    try:
        values = dict(budgets_section)
        if budgets_override:
            values.update(parse_budget_items(budgets_override))
        budgets = Budgets.from_mapping(values)
    except ValueError as e:
        errors.append(f"budgets: {e}")

    if errors:
        raise ValueError("Configuration errors:\n  " + "\n  ".join(errors))

    log_file = merged.get("log_file")
    return CylhomConfig(
        log_level=log_level,
        log_file=Path(log_file) if log_file else None,
        format=fmt,
        k_max=k_max,
        degrees=degrees,
        variant=variant,
        coefficients=coefficients,
        workers=workers,
        budgets=budgets,
    )


def config_to_toml(config: CylhomConfig) -> str:
    """Render the effective configuration in the file format it was read from."""
    lo, hi = config.degrees
    data: dict[str, Any] = {
        "log_level": config.log_level,
        "format": config.format,
        "k_max": config.k_max,
        "degrees": f"{lo}..{hi}",
        "variant": config.variant.value,
        "coefficients": config.coefficients.value,
        "workers": config.workers,
    }
    if config.log_file is not None:
        data["log_file"] = str(config.log_file)
    data["budgets"] = config.budgets.as_dict()
    return tomli_w.dumps(data)
