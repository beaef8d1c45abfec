"""Conley-Zehnder index machinery for simple Reeb orbits and their iterates.

Rotation numbers are exact: a rational part plus an optional infinitesimal
offset, so floor and ceiling of every multiple are computed without floats.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

from cylhom.rationals import format_fraction, parse_fraction

logger = logging.getLogger(__name__)

_ROTATION_RE = re.compile(r"^\s*([+-]?\d+(?:\s*/\s*\d+)?)\s*(?:([+-])\s*eps)?\s*$")


class OrbitType(StrEnum):
    ELLIPTIC = "elliptic"
    POSITIVE_HYPERBOLIC = "positive_hyperbolic"
    NEGATIVE_HYPERBOLIC = "negative_hyperbolic"
    EXPLICIT = "explicit"


class Parity(StrEnum):
    EVEN = "even"
    ODD = "odd"


# --- Conley-Zehnder models ---


@dataclass(frozen=True)
class RotationNumber:
    """θ = r + s·ε with ε a positive infinitesimal."""

    r: Fraction
    s: int = 0

    def __post_init__(self) -> None:
        if self.s not in (-1, 0, 1):
            raise ValueError(f"Infinitesimal offset must be -1, 0 or +1, got {self.s}")
        object.__setattr__(self, "r", Fraction(self.r))

    @classmethod
    def parse(cls, text: str) -> RotationNumber:
        """Parse "p/q", "p/q-eps" or "p/q+eps"."""
        match = _ROTATION_RE.match(text)
        if match is None:
            raise ValueError(f"Malformed rotation number {text!r} (expected p/q, p/q-eps or p/q+eps)")
        sign = match.group(2)
        offset = 0 if sign is None else (1 if sign == "+" else -1)
        return cls(parse_fraction(match.group(1)), offset)

    def __str__(self) -> str:
        suffix = {0: "", 1: "+eps", -1: "-eps"}[self.s]
        return f"{format_fraction(self.r)}{suffix}"

    def floor_multiple(self, k: int) -> int:
        """Exact floor(k·θ) for k >= 1."""
        value = k * self.r
        result = math.floor(value)
        if value.denominator == 1 and self.s == -1:
            result -= 1
        return result

    def ceil_multiple(self, k: int) -> int:
        """Exact ceil(k·θ) for k >= 1."""
        value = k * self.r
        result = math.ceil(value)
        if value.denominator == 1 and self.s == 1:
            result += 1
        return result

    @property
    def is_integral(self) -> bool:
        return self.s == 0 and self.r.denominator == 1

    @property
    def is_half_integral(self) -> bool:
        return self.s == 0 and self.r.denominator == 2


@dataclass(frozen=True)
class RotationModel:
    """μ(γ^k) = floor(kθ) + ceil(kθ)."""

    rotation: RotationNumber

    def index(self, k: int) -> int:
        return self.rotation.floor_multiple(k) + self.rotation.ceil_multiple(k)


@dataclass(frozen=True)
class PeriodicAffineModel:
    """μ(γ^(ℓN+c)) = residues[c] + increment·ℓ, with residues[0] used for ℓ >= 1."""

    period: int
    residues: tuple[int, ...]
    increment: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "residues", tuple(self.residues))
        errors: list[str] = []
        if self.period < 1:
            errors.append(f"period must be positive, got {self.period}")
        if len(self.residues) != self.period:
            errors.append(f"expected {self.period} residues, got {len(self.residues)}")
        if self.increment % 2 != 0:
            errors.append(f"increment must be even, got {self.increment}")
        if errors:
            raise ValueError("Invalid periodic index table: " + "; ".join(errors))

    def index(self, k: int) -> int:
        ell, c = divmod(k, self.period)
        return self.residues[c] + self.increment * ell

    def residue_parity(self, k: int) -> Parity:
        return Parity.EVEN if self.residues[k % self.period] % 2 == 0 else Parity.ODD


ConleyZehnderModel = RotationModel | PeriodicAffineModel


# --- Orbits ---


@dataclass(frozen=True)
class SimpleOrbit:
    """A simple nondegenerate Reeb orbit germ."""

    name: str
    orbit_type: OrbitType
    cz: ConleyZehnderModel
    action: Fraction
    homotopy_seed: int | str = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "action", Fraction(self.action))
        if not self.name:
            raise ValueError("Orbit name must be non-empty")
        if self.action <= 0:
            raise ValueError(f"Orbit {self.name}: action must be positive, got {format_fraction(self.action)}")
        _check_type_rules(self)

    @property
    def is_hyperbolic(self) -> bool:
        return self.orbit_type in (OrbitType.POSITIVE_HYPERBOLIC, OrbitType.NEGATIVE_HYPERBOLIC)

    def iterate(self, k: int) -> OrbitIterate:
        return OrbitIterate(self, k)


def _check_type_rules(orbit: SimpleOrbit) -> None:
    if orbit.orbit_type == OrbitType.EXPLICIT:
        if not isinstance(orbit.cz, PeriodicAffineModel):
            raise ValueError(f"Orbit {orbit.name}: explicit orbits need a periodic index table")
        return
    if not isinstance(orbit.cz, RotationModel):
        raise ValueError(f"Orbit {orbit.name}: {orbit.orbit_type} orbits need a rotation number")

    rotation = orbit.cz.rotation
    match orbit.orbit_type:
        case OrbitType.ELLIPTIC if rotation.s == 0:
            raise ValueError(
                f"Orbit {orbit.name}: elliptic rotation number {rotation} needs an infinitesimal offset"
            )
        case OrbitType.POSITIVE_HYPERBOLIC if not rotation.is_integral:
            raise ValueError(
                f"Orbit {orbit.name}: positive hyperbolic rotation number must be an integer, got {rotation}"
            )
        case OrbitType.NEGATIVE_HYPERBOLIC if not rotation.is_half_integral:
            raise ValueError(
                f"Orbit {orbit.name}: negative hyperbolic rotation number must lie in Z + 1/2, got {rotation}"
            )


@dataclass(frozen=True)
class OrbitIterate:
    """The k-fold cover γ^k of a simple orbit."""

    orbit: SimpleOrbit
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"Cover multiplicity must be >= 1, got {self.k}")

    @property
    def name(self) -> str:
        return self.orbit.name

    @property
    def action(self) -> Fraction:
        return iterate_action(self.orbit, self.k)

    @property
    def cz(self) -> int:
        return cz_index(self.orbit, self.k)

    @property
    def grading(self) -> int:
        return grading(self.orbit, self.k)

    @property
    def parity(self) -> Parity:
        return parity_z2(self.orbit, self.k)

    @property
    def is_bad(self) -> bool:
        return is_bad(self.orbit, self.k)

    def sort_key(self) -> tuple[Fraction, str, int]:
        return (self.action, self.orbit.name, self.k)

    def __str__(self) -> str:
        return self.orbit.name if self.k == 1 else f"{self.orbit.name}^{self.k}"


# --- Operations ---


def cz_index(orbit: SimpleOrbit, k: int) -> int:
    """Conley-Zehnder index of the k-fold iterate."""
    if k < 1:
        raise ValueError(f"Cover multiplicity must be >= 1, got {k}")
    return orbit.cz.index(k)


def grading(orbit: SimpleOrbit, k: int, n: int = 2) -> int:
    """SFT grading μ + n − 3."""
    if n < 2:
        raise ValueError(f"Half-dimension n must be >= 2, got {n}")
    return cz_index(orbit, k) + n - 3


def _type_rule_parity(orbit: SimpleOrbit, k: int) -> Parity:
    if isinstance(orbit.cz, PeriodicAffineModel):
        return orbit.cz.residue_parity(k)
    iterate_is_positive_hyperbolic = orbit.orbit_type == OrbitType.POSITIVE_HYPERBOLIC or (
        orbit.orbit_type == OrbitType.NEGATIVE_HYPERBOLIC and k % 2 == 0
    )
    return Parity.EVEN if iterate_is_positive_hyperbolic else Parity.ODD


def parity_z2(orbit: SimpleOrbit, k: int) -> Parity:
    """Z/2 grading, cross-checked against the orbit-type rule."""
    mu = cz_index(orbit, k)
    parity = Parity.EVEN if mu % 2 == 0 else Parity.ODD
    expected = _type_rule_parity(orbit, k)
    if parity != expected:
        raise RuntimeError(
            f"Parity mismatch for {orbit.name}^{k}: index {mu} is {parity}, type rule says {expected}"
        )
    return parity


def is_bad(orbit: SimpleOrbit, k: int) -> bool:
    """True iff μ(γ^k) − μ(γ) is odd."""
    bad = (cz_index(orbit, k) - cz_index(orbit, 1)) % 2 == 1
    if isinstance(orbit.cz, RotationModel):
        expected = orbit.orbit_type == OrbitType.NEGATIVE_HYPERBOLIC and k % 2 == 0
        if bad != expected:
            raise RuntimeError(f"Bad-orbit characterizations disagree for {orbit.name}^{k}")
    return bad


def almost_linear_bounds(orbit: SimpleOrbit, k: int) -> tuple[int, int]:
    """Bounds k·μ(γ) ∓ (k − 1) on μ(γ^k), asserted against the index."""
    if not isinstance(orbit.cz, RotationModel):
        raise ValueError(f"Orbit {orbit.name}: almost-linear bounds need a rotation number")
    mu_simple = cz_index(orbit, 1)
    lower = k * mu_simple - k + 1
    upper = k * mu_simple + k - 1
    mu = cz_index(orbit, k)
    if not lower <= mu <= upper:
        raise RuntimeError(f"{orbit.name}^{k}: index {mu} outside almost-linear bounds [{lower}, {upper}]")
    if orbit.is_hyperbolic and mu != k * mu_simple:
        raise RuntimeError(f"{orbit.name}^{k}: hyperbolic index {mu} is not {k}·{mu_simple}")
    return lower, upper


def iterate_action(orbit: SimpleOrbit, k: int) -> Fraction:
    if k < 1:
        raise ValueError(f"Cover multiplicity must be >= 1, got {k}")
    return k * orbit.action
