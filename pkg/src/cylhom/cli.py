"""CLI entry point for cylhom."""

from __future__ import annotations

import json
import logging
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, TypeVar

import typer
from pydantic import BaseModel

from cylhom import __version__
from cylhom.buildings import enumerate_buildings, verify_condition_D, verify_lemmas
from cylhom.chain import (
    DifferentialSquareError,
    build_generators,
    check_d_squared,
    differential,
    homology,
)
from cylhom.config import DEFAULT_CONFIG_NAME, CylhomConfig, config_to_toml, load_config, merge_config
from cylhom.document import (
    Document,
    IterateRef,
    buildings_report,
    classify_report,
    cobordism_report,
    condition_d_report,
    cz_report,
    document_schema,
    homology_report,
    index_report,
    load_document,
)
from cylhom.dynamics import OrbitSet, is_dynamically_convex, is_dynamically_separated
from cylhom.indices import PunctureConfig, regularity_report
from cylhom.logging_setup import setup_logging
from cylhom.models import MODEL_NAMES, cobordism_grading_table, model_preset
from cylhom.output import write_report
from cylhom.rationals import parse_cap
from cylhom.reporter import (
    format_buildings,
    format_classify,
    format_cobordism,
    format_condition_d,
    format_cz,
    format_homology,
    format_index,
)

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_INTERNAL = 3
EXIT_MATH = 4

app = typer.Typer(
    name="cylhom",
    help="Cylindrical contact homology combinatorics: indices, buildings and chain complexes.",
    invoke_without_command=True,
    no_args_is_help=True,
)

R = TypeVar("R", bound=BaseModel)

_INPUT_HELP = "Path to a JSON orbit-set document"
_MODEL_HELP = f"Built-in model ({', '.join(MODEL_NAMES)})"


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map exceptions to exit codes: 2 input, 3 internal, 4 ∂² ≠ 0."""
    try:
        yield
    except typer.Exit:
        raise
    except DifferentialSquareError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_MATH)
    except (ValueError, OSError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_INPUT)
    except RuntimeError as e:
        logger.debug("Internal check failed", exc_info=True)
        typer.echo(f"Internal error: {e}", err=True)
        raise typer.Exit(code=EXIT_INTERNAL)


def _resolve_config_path(config: Optional[str]) -> Path | None:
    """Resolve the config file path, falling back to ./cylhom.toml when present."""
    if config is not None:
        path = Path(config)
        if not path.exists():
            raise ValueError(f"Config file not found: {path}")
        return path
    default = Path(DEFAULT_CONFIG_NAME)
    return default if default.exists() else None


def _build_config(config: Optional[str], overrides: dict[str, Any]) -> CylhomConfig:
    """Load TOML config, merge CLI overrides and set up logging."""
    path = _resolve_config_path(config)
    file_config = load_config(path) if path is not None else {}
    cfg = merge_config(file_config, overrides)
    setup_logging(cfg.log_level, cfg.log_file)
    return cfg


def _load_input(
    input_path: Optional[str],
    model: Optional[str],
    n: int,
    action_cap: Optional[str],
) -> tuple[Document, OrbitSet]:
    if (input_path is None) == (model is None):
        raise ValueError("Give exactly one of --input or --model")
    if input_path is not None:
        document = load_document(Path(input_path))
        orbit_set = document.to_orbit_set()
    else:
        assert model is not None
        document = Document()
        orbit_set = model_preset(model, n)
    if action_cap is not None:
        orbit_set = replace(orbit_set, action_cap=parse_cap(action_cap))
    return document, orbit_set


def _pick(*values: Any) -> Any:
    """First value that is not None."""
    return next((v for v in values if v is not None), None)


def _emit(report: R, render: Callable[[R], str], cfg: CylhomConfig, output: Optional[str]) -> None:
    if cfg.format == "json":
        typer.echo(report.model_dump_json(indent=2))
    else:
        typer.echo(render(report), nl=False)
    if output is not None:
        write_report(report, Path(output))
        logger.info("Wrote %s", output)


def _input_option() -> Any:
    return typer.Option(None, "--input", help=_INPUT_HELP)


def _model_option() -> Any:
    return typer.Option(None, "--model", help=_MODEL_HELP)


def _n_option() -> Any:
    return typer.Option(2, "--n", help="Lens space parameter for --model lens (L(n+1, n))")


def _cap_option() -> Any:
    return typer.Option(None, "--action-cap", help="Action cap P/Q or 'inf' (overrides the input)")


def _format_option() -> Any:
    return typer.Option(None, "--format", help="Output format: text or json")


def _output_option() -> Any:
    return typer.Option(None, "--output", help="Also write the JSON report to this path")


def _config_option() -> Any:
    return typer.Option(None, "--config", help=f"Path to TOML config file (default: ./{DEFAULT_CONFIG_NAME})")


def _log_level_option() -> Any:
    return typer.Option(None, "--log-level", help="Override log level")


@app.command()
def cz(
    input_path: Optional[str] = _input_option(),
    model: Optional[str] = _model_option(),
    n: int = _n_option(),
    action_cap: Optional[str] = _cap_option(),
    k_max: Optional[int] = typer.Option(None, "--k-max", help="Largest iterate to list"),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Tabulate μ, grading, parity, good/bad, action and class per iterate."""
    with _exit_codes():
        document, orbit_set = _load_input(input_path, model, n, action_cap)
        cfg = _build_config(
            config,
            {"format": fmt, "log_level": log_level, "k_max": _pick(k_max, document.params.k_max)},
        )
        _emit(cz_report(orbit_set, cfg.k_max), format_cz, cfg, output)


@app.command()
def classify(
    input_path: Optional[str] = _input_option(),
    model: Optional[str] = _model_option(),
    n: int = _n_option(),
    action_cap: Optional[str] = _cap_option(),
    k_max: Optional[int] = typer.Option(None, "--k-max", help="Largest iterate to check"),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Check dynamical convexity and dynamical separation."""
    with _exit_codes():
        document, orbit_set = _load_input(input_path, model, n, action_cap)
        cfg = _build_config(
            config,
            {"format": fmt, "log_level": log_level, "k_max": _pick(k_max, document.params.k_max)},
        )
        convexity = is_dynamically_convex(orbit_set, cfg.k_max)
        separation = is_dynamically_separated(orbit_set, cfg.k_max)
        _emit(classify_report(convexity, separation), format_classify, cfg, output)


@app.command()
def buildings(
    input_path: Optional[str] = _input_option(),
    model: Optional[str] = _model_option(),
    n: int = _n_option(),
    action_cap: Optional[str] = _cap_option(),
    target_index: Optional[int] = typer.Option(None, "--target-index", help="Total index (default 2)"),
    negative_ends: Optional[int] = typer.Option(None, "--negative-ends", help="0 or 1 (default 1)"),
    budgets: Optional[str] = typer.Option(None, "--budgets", help="e.g. levels=3,cover=4,branch=2,components=3"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker processes for the search"),
    verify: bool = typer.Option(False, "--verify", help="Also run the plane, cylinder and index-2 checks"),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Enumerate buildings of a given index within budgets."""
    with _exit_codes():
        document, orbit_set = _load_input(input_path, model, n, action_cap)
        params = document.params
        cfg = _build_config(
            config,
            {
                "format": fmt,
                "log_level": log_level,
                "workers": workers,
                "budgets": _pick(budgets, params.budgets),
            },
        )
        target = _pick(target_index, params.target_index, 2)
        ends = _pick(negative_ends, params.negative_ends, 1)
        result = enumerate_buildings(orbit_set, target, ends, cfg.budgets, workers=cfg.workers)
        certificate = verify_lemmas(orbit_set, cfg.budgets, workers=cfg.workers) if verify else None
        _emit(buildings_report(result, certificate), format_buildings, cfg, output)


@app.command(name="condition-d")
def condition_d(
    x: Optional[str] = typer.Option(None, "--x", help="Upper iterate, name or name^k"),
    z: Optional[str] = typer.Option(None, "--z", help="Lower iterate, name or name^k"),
    input_path: Optional[str] = _input_option(),
    model: Optional[str] = _model_option(),
    n: int = _n_option(),
    action_cap: Optional[str] = _cap_option(),
    budgets: Optional[str] = typer.Option(None, "--budgets", help="e.g. levels=3,cover=4,branch=2,components=3"),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Check that index-2 limits from x to z break at most once."""
    with _exit_codes():
        document, orbit_set = _load_input(input_path, model, n, action_cap)
        params = document.params
        cfg = _build_config(
            config,
            {"format": fmt, "log_level": log_level, "budgets": _pick(budgets, params.budgets)},
        )
        x_ref = IterateRef.parse(x) if x is not None else params.x
        z_ref = IterateRef.parse(z) if z is not None else params.z
        if x_ref is None or z_ref is None:
            raise ValueError("condition-d needs --x and --z")
        certificate = verify_condition_D(orbit_set, x_ref.resolve(orbit_set), z_ref.resolve(orbit_set), cfg.budgets)
        _emit(condition_d_report(certificate), format_condition_d, cfg, output)


@app.command(name="homology")
def homology_cmd(
    input_path: Optional[str] = _input_option(),
    model: Optional[str] = _model_option(),
    n: int = _n_option(),
    action_cap: Optional[str] = _cap_option(),
    degrees: Optional[str] = typer.Option(None, "--degrees", help="Degree window LO..HI"),
    variant: Optional[str] = typer.Option(None, "--variant", help="minus (κδ) or plus (δκ)"),
    coefficients: Optional[str] = typer.Option(None, "--coefficients", help="Q, Z or Z2"),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Check ∂² = 0 and compute homology ranks per degree."""
    with _exit_codes():
        document, orbit_set = _load_input(input_path, model, n, action_cap)
        params = document.params
        cfg = _build_config(
            config,
            {
                "format": fmt,
                "log_level": log_level,
                "degrees": _pick(degrees, params.degrees),
                "variant": _pick(variant, params.variant),
                "coefficients": _pick(coefficients, params.coefficients),
            },
        )
        table = build_generators(orbit_set, deg_range=cfg.degrees)
        moduli = document.to_moduli(orbit_set)
        complex_ = differential(table, moduli, cfg.variant)
        check = check_d_squared(complex_)
        result = homology(complex_, coefficients=cfg.coefficients) if check.passed else None
        report = homology_report(check, cfg.variant, cfg.coefficients, cfg.degrees, len(table), result)
        _emit(report, format_homology, cfg, output)
        if not check.passed:
            raise typer.Exit(code=EXIT_MATH)


@app.command(name="index")
def index_cmd(
    positive: str = typer.Option(..., "--positive", help="Positive end, name or name^k"),
    negative: Optional[list[str]] = typer.Option(None, "--negative", help="Negative end (repeatable)"),
    z: int = typer.Option(0, "--z", help="Z(du): total order of zeros of the normal derivative du"),
    input_path: Optional[str] = _input_option(),
    model: Optional[str] = _model_option(),
    n: int = _n_option(),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Fredholm index, #Γ₀, normal Chern number and automatic transversality."""
    with _exit_codes():
        _, orbit_set = _load_input(input_path, model, n, None)
        cfg = _build_config(config, {"format": fmt, "log_level": log_level})
        top = IterateRef.parse(positive).resolve(orbit_set)
        bottoms = tuple(IterateRef.parse(text).resolve(orbit_set) for text in negative or [])
        report = index_report(regularity_report(PunctureConfig(top, bottoms), z))
        _emit(report, format_index, cfg, output)


@app.command()
def cobordism(
    max_grading: int = typer.Option(8, "--max-grading", help="Largest grading to list"),
    fmt: Optional[str] = _format_option(),
    output: Optional[str] = _output_option(),
    config: Optional[str] = _config_option(),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Gradings on both ends of the ellipsoid cobordism and the double cover index."""
    with _exit_codes():
        cfg = _build_config(config, {"format": fmt, "log_level": log_level})
        _emit(cobordism_report(cobordism_grading_table(max_grading)), format_cobordism, cfg, output)


@app.command()
def schema() -> None:
    """Print the JSON schema of input documents."""
    typer.echo(json.dumps(document_schema(), indent=2, ensure_ascii=False))


@app.command(name="config")
def config_cmd(
    config: Optional[str] = _config_option(),
    budgets: Optional[str] = typer.Option(None, "--budgets", help="Budget overrides"),
    log_level: Optional[str] = _log_level_option(),
) -> None:
    """Print the effective configuration as TOML."""
    with _exit_codes():
        cfg = _build_config(config, {"budgets": budgets, "log_level": log_level})
        typer.echo(config_to_toml(cfg), nl=False)


@app.command()
def version() -> None:
    """Print version information."""
    typer.echo(f"cylhom {__version__}")


if __name__ == "__main__":
    app()
