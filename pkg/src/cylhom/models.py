"""Built-in orbit sets: ellipsoids, prequantized S³ and the lens spaces L(n+1, n)."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from cylhom.dynamics import CyclicHomotopy, OrbitSet, TrivialHomotopy
from cylhom.orbits import (
    OrbitIterate,
    OrbitType,
    PeriodicAffineModel,
    RotationModel,
    RotationNumber,
    SimpleOrbit,
)

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = Fraction(1, 100)


# --- Ellipsoids ---


@dataclass(frozen=True)
class EllipsoidSpec:
    """Rotation data φ₁ = a/b, φ₂ = b/a and the two simple actions."""

    phi1: RotationNumber
    phi2: RotationNumber
    action1: Fraction = Fraction(1)
    action2: Fraction = Fraction(1)
    names: tuple[str, str] = ("gamma1", "gamma2")

    def __post_init__(self) -> None:
        errors: list[str] = []
        if self.phi1.r * self.phi2.r != 1:
            errors.append(f"φ₁·φ₂ must be 1, got {self.phi1.r * self.phi2.r}")
        if self.phi2.s != -self.phi1.s:
            errors.append(f"offsets must be opposite, got {self.phi1.s} and {self.phi2.s}")
        if self.phi1.s == 0:
            errors.append("rotation data needs an infinitesimal offset (a/b irrational)")
        if errors:
            raise ValueError("Invalid ellipsoid: " + "; ".join(errors))


def ellipsoid(spec: EllipsoidSpec, action_cap: Fraction | None = None) -> OrbitSet:
    """Two elliptic orbits with μ(γᵢ^k) = 2⌊k(1 + φᵢ)⌋ + 1."""
    orbits = tuple(
        SimpleOrbit(
            name=name,
            orbit_type=OrbitType.ELLIPTIC,
            cz=RotationModel(RotationNumber(1 + phi.r, phi.s)),
            action=action,
        )
        for name, phi, action in zip(
            spec.names, (spec.phi1, spec.phi2), (spec.action1, spec.action2)
        )
    )
    notes = f"ellipsoid with φ₁ = {spec.phi1}, φ₂ = {spec.phi2}"
    return OrbitSet(orbits, TrivialHomotopy(), action_cap, notes)


def ellipsoid_dynsep(action_cap: Fraction | None = Fraction(99)) -> OrbitSet:
    """E(1, 1 + ε): dynamically separated up to the cap."""
    spec = EllipsoidSpec(RotationNumber(Fraction(1), -1), RotationNumber(Fraction(1), 1))
    return ellipsoid(spec, action_cap)


def ellipsoid_noinvariance_plus(action_cap: Fraction | None = None) -> OrbitSet:
    """E(1 − ε, 2 + ε), orbits δ₁ and δ₂."""
    spec = EllipsoidSpec(
        RotationNumber(Fraction(1, 2), -1),
        RotationNumber(Fraction(2), 1),
        Fraction(1),
        Fraction(2),
        ("delta1", "delta2"),
    )
    return ellipsoid(spec, action_cap)


def ellipsoid_noinvariance_minus(action_cap: Fraction | None = None) -> OrbitSet:
    """E(1 − ε, 1 + ε), orbits γ₁ and γ₂."""
    spec = EllipsoidSpec(RotationNumber(Fraction(1), -1), RotationNumber(Fraction(1), 1))
    return ellipsoid(spec, action_cap)


def ellipsoid_thin(action_cap: Fraction | None = Fraction(6)) -> OrbitSet:
    """E(1, 3 + ε), a representative of 0 < a < b/2."""
    spec = EllipsoidSpec(
        RotationNumber(Fraction(1, 3), -1),
        RotationNumber(Fraction(3), 1),
        Fraction(1),
        Fraction(3),
    )
    return ellipsoid(spec, action_cap)


# --- Prequantizations ---


@dataclass(frozen=True)
class MorseData:
    """Critical points (name, Morse index) of a Morse function on S²."""

    critical_points: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "critical_points", tuple(tuple(p) for p in self.critical_points))
        errors: list[str] = []
        if not self.critical_points:
            errors.append("no critical points")
        names = [name for name, _ in self.critical_points]
        if len(set(names)) != len(names):
            errors.append("critical point names must be unique")
        bad = [f"{name}: {index}" for name, index in self.critical_points if index not in (0, 1, 2)]
        if bad:
            errors.append(f"Morse indices must be 0, 1 or 2 ({', '.join(bad)})")
        counts = Counter(index for _, index in self.critical_points)
        euler = counts[0] - counts[1] + counts[2]
        if self.critical_points and euler != 2:
            errors.append(f"#min − #saddle + #max = {euler}, S² needs 2")
        if errors:
            raise ValueError("Invalid Morse data: " + "; ".join(errors))

    @classmethod
    def height(cls) -> MorseData:
        return cls((("south", 0), ("north", 2)))


_PREQUANTIZED_ROTATION = {
    0: (OrbitType.ELLIPTIC, RotationNumber(Fraction(2), -1)),
    1: (OrbitType.POSITIVE_HYPERBOLIC, RotationNumber(Fraction(2), 0)),
    2: (OrbitType.ELLIPTIC, RotationNumber(Fraction(2), 1)),
}


def _check_epsilon(epsilon: Fraction) -> None:
    if not 0 < epsilon < Fraction(1, 2):
        raise ValueError(f"Action perturbation must lie in (0, 1/2), got {epsilon}")


def prequantized_s3(
    h: MorseData,
    epsilon: Fraction = DEFAULT_EPSILON,
    action_cap: Fraction | None = None,
) -> OrbitSet:
    """One orbit per critical point p with μ(γ_p^k) = 4k − 1 + index_p(H).

    Simple actions are 1 + ε·index_p, so orbits over higher critical points
    are longer.
    """
    _check_epsilon(epsilon)
    orbits = []
    for name, index in h.critical_points:
        orbit_type, rotation = _PREQUANTIZED_ROTATION[index]
        orbits.append(
            SimpleOrbit(
                name=f"gamma_{name}",
                orbit_type=orbit_type,
                cz=RotationModel(rotation),
                action=1 + epsilon * index,
            )
        )
    return OrbitSet(tuple(orbits), TrivialHomotopy(), action_cap, "prequantized S³")


def lens_space(
    n: int,
    h: MorseData,
    epsilon: Fraction = DEFAULT_EPSILON,
    action_cap: Fraction | None = None,
) -> OrbitSet:
    """L(n+1, n): period-(n+1) index tables, classes in Z/(n+1)."""
    if n < 1:
        raise ValueError(f"Lens space parameter n must be >= 1, got {n}")
    _check_epsilon(epsilon)
    period = n + 1
    orbits = tuple(
        SimpleOrbit(
            name=f"gamma_{name}",
            orbit_type=OrbitType.EXPLICIT,
            cz=PeriodicAffineModel(period, (-1 + index,) + (1 + index,) * n, 4),
            action=(1 + epsilon * index) / period,
            homotopy_seed=1,
        )
        for name, index in h.critical_points
    )
    logger.debug("Lens space L(%d, %d) with %d orbits", period, n, len(orbits))
    return OrbitSet(orbits, CyclicHomotopy(period), action_cap, f"lens space L({period}, {n})")


# --- Cobordism gradings ---


@dataclass(frozen=True)
class GradingMatch:
    positive: OrbitIterate
    negative: OrbitIterate
    grading: int


@dataclass(frozen=True)
class CobordismTable:
    positive_end: tuple[OrbitIterate, ...]
    negative_end: tuple[OrbitIterate, ...]
    matches: tuple[GradingMatch, ...]
    simple_matches: tuple[GradingMatch, ...]
    base_cylinder_index: int
    double_cover_index: int


def _graded_iterates(orbit_set: OrbitSet, max_grading: int) -> tuple[OrbitIterate, ...]:
    found = [
        it
        for it in orbit_set.iterates(k_cap=max_grading + 2)
        if it.grading <= max_grading
    ]
    return tuple(sorted(found, key=lambda it: (it.grading, it.name, it.k)))


def cobordism_grading_table(max_grading: int = 8) -> CobordismTable:
    """Gradings of E(1−ε, 2+ε) over E(1−ε, 1+ε) and the doubly covered cylinder."""
    top = _graded_iterates(ellipsoid_noinvariance_plus(), max_grading)
    bottom = _graded_iterates(ellipsoid_noinvariance_minus(), max_grading)
    matches = tuple(
        GradingMatch(p, m, p.grading)
        for p in top
        for m in bottom
        if p.grading == m.grading
    )
    simple = tuple(match for match in matches if match.positive.k == 1)

    delta1 = next(p for p in top if p.name == "delta1" and p.k == 1)
    gamma1 = next(m for m in bottom if m.name == "gamma1" and m.k == 1)
    # Cobordism index convention: ind = μ₊ − μ₋.
    base_index = delta1.cz - gamma1.cz
    double_index = delta1.orbit.iterate(2).cz - gamma1.orbit.iterate(2).cz
    return CobordismTable(top, bottom, matches, simple, base_index, double_index)


# --- Presets ---

MODEL_NAMES = (
    "ellipsoid-dynsep",
    "ellipsoid-noinvariance-plus",
    "ellipsoid-noinvariance-minus",
    "ellipsoid-thin",
    "s3",
    "lens",
)


def model_preset(name: str, n: int = 2, action_cap: Fraction | None = None) -> OrbitSet:
    """Build a named model; the cap overrides the model's default when given."""
    match name:
        case "ellipsoid-dynsep":
            return ellipsoid_dynsep(action_cap) if action_cap is not None else ellipsoid_dynsep()
        case "ellipsoid-noinvariance-plus":
            return ellipsoid_noinvariance_plus(action_cap)
        case "ellipsoid-noinvariance-minus":
            return ellipsoid_noinvariance_minus(action_cap)
        case "ellipsoid-thin":
            return ellipsoid_thin(action_cap) if action_cap is not None else ellipsoid_thin()
        case "s3":
            return prequantized_s3(MorseData.height(), action_cap=action_cap)
        case "lens":
            return lens_space(n, MorseData.height(), action_cap=action_cap)
    raise ValueError(f"Unknown model {name!r}; choose one of {', '.join(MODEL_NAMES)}")
