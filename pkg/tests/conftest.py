"""Shared test fixtures for cylhom."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import pytest
import tomli_w

from cylhom.dynamics import OrbitSet
from cylhom.models import MorseData, ellipsoid_thin, prequantized_s3
from cylhom.orbits import OrbitType, PeriodicAffineModel, RotationModel, RotationNumber, SimpleOrbit


def make_elliptic(name: str, r: Fraction | int, action: Fraction | int = 1, s: int = 1) -> SimpleOrbit:
    return SimpleOrbit(name, OrbitType.ELLIPTIC, RotationModel(RotationNumber(Fraction(r), s)), Fraction(action))


def make_explicit(name: str, base: int, action: Fraction | int, increment: int = 2) -> SimpleOrbit:
    """Period-1 table: μ(γ^k) = base + increment·k."""
    return SimpleOrbit(name, OrbitType.EXPLICIT, PeriodicAffineModel(1, (base,), increment), Fraction(action))


@pytest.fixture
def thin() -> OrbitSet:
    """E(1, 3 + ε) capped at action 6."""
    return ellipsoid_thin()


@pytest.fixture
def sphere() -> OrbitSet:
    """Prequantized S³ over the height function, capped at action 3."""
    return prequantized_s3(MorseData.height(), action_cap=Fraction(3))


@pytest.fixture
def planted() -> OrbitSet:
    """A contractible positive hyperbolic orbit with μ = 2."""
    h = SimpleOrbit("h", OrbitType.POSITIVE_HYPERBOLIC, RotationModel(RotationNumber(Fraction(1))), Fraction(1))
    return OrbitSet((h,), action_cap=Fraction(2))


@pytest.fixture
def ladder() -> OrbitSet:
    """Explicit orbits x, y, z with μ = 5, 4, 3 and decreasing action."""
    return OrbitSet(
        (
            make_explicit("x", 3, 3),
            make_explicit("y", 2, 2),
            make_explicit("z", 1, 1),
        )
    )


@pytest.fixture
def sample_document() -> dict[str, Any]:
    """A minimal valid input document with one elliptic orbit."""
    return {
        "version": "1",
        "orbit_set": {
            "orbits": [
                {
                    "name": "gamma",
                    "type": "elliptic",
                    "cz": {"kind": "rotation", "rotation": "2-eps"},
                    "action": "1",
                }
            ],
            "action_cap": "4",
        },
    }


@pytest.fixture
def ladder_document() -> dict[str, Any]:
    """x → y → z with nonzero ∂²."""
    orbits = [
        {"name": name, "type": "explicit", "cz": {"kind": "periodic", "period": 1, "residues": [base], "increment": 2}, "action": action}
        for name, base, action in (("x", 3, "3"), ("y", 2, "2"), ("z", 1, "1"))
    ]
    return {
        "version": "1",
        "orbit_set": {"orbits": orbits},
        "moduli": [
            {"x": {"orbit": "x"}, "y": {"orbit": "y"}, "sign": 1},
            {"x": {"orbit": "y"}, "y": {"orbit": "z"}, "sign": 1},
        ],
        "params": {"degrees": "0..6"},
    }


def write_json(path: Path, data: dict[str, Any]) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


@pytest.fixture
def sample_config_dict() -> dict[str, Any]:
    """Return a config dict touching every section."""
    return {
        "log_level": "INFO",
        "k_max": 7,
        "degrees": "0..10",
        "budgets": {"levels": 2, "cover": 3},
    }


@pytest.fixture
def sample_config_file(tmp_path: Path, sample_config_dict: dict[str, Any]) -> Path:
    """Write a sample config TOML file and return its path."""
    config_path = tmp_path / "cylhom.toml"
    config_path.write_bytes(tomli_w.dumps(sample_config_dict).encode())
    return config_path
