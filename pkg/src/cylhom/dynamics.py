"""Free homotopy bookkeeping and the dynamical convexity / separation classifiers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from cylhom.orbits import OrbitIterate, SimpleOrbit, cz_index, iterate_action

logger = logging.getLogger(__name__)

ClassLabel = int | str
CONTRACTIBLE: ClassLabel = 0


def class_sort_key(label: ClassLabel) -> tuple[int, int | str]:
    """Integers before strings, each in natural order."""
    return (0, label) if isinstance(label, int) else (1, label)


# --- Homotopy models ---


@dataclass(frozen=True)
class TrivialHomotopy:
    """Every orbit is contractible."""

    def class_of(self, orbit: SimpleOrbit, k: int) -> ClassLabel:
        return CONTRACTIBLE

    def validate_seed(self, orbit: SimpleOrbit) -> None:
        if orbit.homotopy_seed != CONTRACTIBLE:
            raise ValueError(f"Orbit {orbit.name}: the trivial homotopy model only admits seed 0")

    def k_bound(self) -> int | None:
        return None

    def combines(self, target: ClassLabel, parts: Iterable[ClassLabel]) -> bool:
        return True


@dataclass(frozen=True)
class CyclicHomotopy:
    """Classes in Z/N: class(γ^k) = k·seed mod N."""

    order: int

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError(f"Cyclic homotopy model needs order >= 2, got {self.order}")

    def class_of(self, orbit: SimpleOrbit, k: int) -> ClassLabel:
        seed = orbit.homotopy_seed
        assert isinstance(seed, int)
        return (k * seed) % self.order

    def validate_seed(self, orbit: SimpleOrbit) -> None:
        seed = orbit.homotopy_seed
        if not isinstance(seed, int) or not 0 <= seed < self.order:
            raise ValueError(
                f"Orbit {orbit.name}: seed must be an integer in [0, {self.order}), got {seed!r}"
            )

    def k_bound(self) -> int | None:
        return None

    def combines(self, target: ClassLabel, parts: Iterable[ClassLabel]) -> bool:
        total = sum(int(p) for p in parts)
        return (total - int(target)) % self.order == 0


@dataclass(frozen=True)
class TableHomotopy:
    """Explicit class labels for (orbit name, k) with k <= bound."""

    bound: int
    entries: tuple[tuple[str, int, ClassLabel], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        if self.bound < 1:
            raise ValueError(f"Homotopy table bound must be >= 1, got {self.bound}")
        seen: set[tuple[str, int]] = set()
        for name, k, _label in self.entries:
            if not 1 <= k <= self.bound:
                raise ValueError(f"Homotopy table entry ({name}, {k}) outside 1..{self.bound}")
            if (name, k) in seen:
                raise ValueError(f"Duplicate homotopy table entry ({name}, {k})")
            seen.add((name, k))

    @cached_property
    def _lookup(self) -> dict[tuple[str, int], ClassLabel]:
        return {(name, k): label for name, k, label in self.entries}

    def class_of(self, orbit: SimpleOrbit, k: int) -> ClassLabel:
        if k > self.bound:
            raise ValueError(f"{orbit.name}^{k} is beyond the homotopy table bound {self.bound}")
        try:
            return self._lookup[(orbit.name, k)]
        except KeyError:
            raise ValueError(f"Homotopy table has no entry for {orbit.name}^{k}") from None

    def validate_seed(self, orbit: SimpleOrbit) -> None:
        missing = [k for k in range(1, self.bound + 1) if (orbit.name, k) not in self._lookup]
        if missing:
            raise ValueError(f"Homotopy table is not total for {orbit.name}: missing k = {missing}")
        if self._lookup[(orbit.name, 1)] != orbit.homotopy_seed:
            raise ValueError(
                f"Orbit {orbit.name}: seed {orbit.homotopy_seed!r} disagrees with the table entry "
                f"{self._lookup[(orbit.name, 1)]!r}"
            )

    def k_bound(self) -> int | None:
        return self.bound

    def combines(self, target: ClassLabel, parts: Iterable[ClassLabel]) -> bool:
        # Without a group structure only the contractible case is decidable.
        parts = list(parts)
        if len(parts) == 1:
            return parts[0] == target
        return target == CONTRACTIBLE and all(p == CONTRACTIBLE for p in parts)


FreeHomotopyModel = TrivialHomotopy | CyclicHomotopy | TableHomotopy


# --- Orbit sets ---


@dataclass(frozen=True)
class OrbitSet:
    orbits: tuple[SimpleOrbit, ...] = ()
    homotopy: FreeHomotopyModel = field(default_factory=TrivialHomotopy)
    action_cap: Fraction | None = None
    notes: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "orbits", tuple(self.orbits))
        errors: list[str] = []
        names = [o.name for o in self.orbits]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            errors.append(f"duplicate orbit names: {', '.join(duplicates)}")
        for orbit in self.orbits:
            try:
                self.homotopy.validate_seed(orbit)
            except ValueError as e:
                errors.append(str(e))
        if self.action_cap is not None and self.action_cap <= 0:
            errors.append("action cap must be positive")
        if errors:
            raise ValueError("Invalid orbit set:\n  " + "\n  ".join(errors))

    def orbit(self, name: str) -> SimpleOrbit:
        for orbit in self.orbits:
            if orbit.name == name:
                return orbit
        raise ValueError(f"No orbit named {name!r}")

    def class_of(self, iterate: OrbitIterate) -> ClassLabel:
        return class_of(self, iterate.orbit, iterate.k)

    def is_contractible(self, iterate: OrbitIterate) -> bool:
        return self.class_of(iterate) == CONTRACTIBLE

    def iterates(self, action_cap: Fraction | None = None, k_cap: int | None = None) -> list[OrbitIterate]:
        """All iterates with action <= cap and k <= k_cap, canonically ordered.

        With no explicit caps the set's own action cap applies; at least one
        bound must be finite.
        """
        cap = self.action_cap if action_cap is None else action_cap
        bound = self.homotopy.k_bound()
        if cap is None and k_cap is None and bound is None:
            raise ValueError("Iterate enumeration needs an action cap or a k cap")
        result: list[OrbitIterate] = []
        for orbit in self.orbits:
            k_limit = k_cap
            if cap is not None:
                by_action = int(cap / orbit.action)
                k_limit = by_action if k_limit is None else min(k_limit, by_action)
            if bound is not None:
                k_limit = bound if k_limit is None else min(k_limit, bound)
            assert k_limit is not None
            result.extend(OrbitIterate(orbit, k) for k in range(1, k_limit + 1))
        return sorted(result, key=OrbitIterate.sort_key)


def class_of(orbit_set: OrbitSet, orbit: SimpleOrbit, k: int) -> ClassLabel:
    """Free homotopy class of γ^k."""
    if k < 1:
        raise ValueError(f"Cover multiplicity must be >= 1, got {k}")
    return orbit_set.homotopy.class_of(orbit, k)


def iterate_list(orbit_set: OrbitSet, orbit: SimpleOrbit, c: ClassLabel, bound: int) -> list[int]:
    """All k <= bound with γ^k in class c, increasing."""
    if bound < 1:
        return []
    return [k for k in range(1, bound + 1) if class_of(orbit_set, orbit, k) == c]


def _classes_of(orbit_set: OrbitSet, orbit: SimpleOrbit, k_cap: int) -> list[ClassLabel]:
    labels = {class_of(orbit_set, orbit, k) for k in range(1, k_cap + 1)}
    return sorted(labels, key=class_sort_key)


def _effective_k_cap(orbit_set: OrbitSet, k_cap: int) -> int:
    bound = orbit_set.homotopy.k_bound()
    return k_cap if bound is None else min(k_cap, bound)


# --- Dynamical convexity ---


@dataclass(frozen=True)
class ConvexityViolation:
    orbit: str
    k: int
    cz: int


@dataclass(frozen=True)
class ConvexityReport:
    passed: bool
    violations: tuple[ConvexityViolation, ...]
    k_cap: int
    action_cap: Fraction | None


def is_dynamically_convex(
    orbit_set: OrbitSet,
    k_cap: int,
    action_cap: Fraction | None = None,
) -> ConvexityReport:
    """Every contractible iterate within the caps has μ >= 3."""
    cap = orbit_set.action_cap if action_cap is None else action_cap
    k_cap = _effective_k_cap(orbit_set, k_cap)
    violations: list[ConvexityViolation] = []
    for orbit in orbit_set.orbits:
        for k in range(1, k_cap + 1):
            if cap is not None and iterate_action(orbit, k) > cap:
                break
            if class_of(orbit_set, orbit, k) != CONTRACTIBLE:
                continue
            mu = cz_index(orbit, k)
            if mu < 3:
                violations.append(ConvexityViolation(orbit.name, k, mu))
    return ConvexityReport(not violations, tuple(violations), k_cap, cap)


# --- Dynamical separation ---


@dataclass(frozen=True)
class SeparationViolation:
    """A violated separation condition.

    ``condition`` is one of ``contractible_start`` (first contractible iterate
    outside [3, 5]), ``noncontractible_start`` (first noncontractible iterate
    below 1) or ``increment`` (consecutive same-class iterates not 4 apart).
    """

    condition: str
    orbit: str
    homotopy_class: ClassLabel
    k: int
    cz: int
    previous_k: int | None = None
    previous_cz: int | None = None


@dataclass(frozen=True)
class SeparationReport:
    passed: bool
    violations: tuple[SeparationViolation, ...]
    k_cap: int
    action_cap: Fraction | None
    # Smallest action at which a violation occurs; the set is separated below it.
    separated_below: Fraction | None = None


def is_dynamically_separated(
    orbit_set: OrbitSet,
    k_cap: int,
    action_cap: Fraction | None = None,
) -> SeparationReport:
    """Check first-iterate windows and the +4 increment per orbit and class."""
    cap = orbit_set.action_cap if action_cap is None else action_cap
    k_cap = _effective_k_cap(orbit_set, k_cap)
    violations: list[SeparationViolation] = []
    first_bad: Fraction | None = None

    for orbit in orbit_set.orbits:
        for c in _classes_of(orbit_set, orbit, k_cap):
            ks = [
                k
                for k in iterate_list(orbit_set, orbit, c, k_cap)
                if cap is None or iterate_action(orbit, k) <= cap
            ]
            if not ks:
                continue
            found: list[SeparationViolation] = []
            mu_first = cz_index(orbit, ks[0])
            if c == CONTRACTIBLE and not 3 <= mu_first <= 5:
                found.append(SeparationViolation("contractible_start", orbit.name, c, ks[0], mu_first))
            if c != CONTRACTIBLE and mu_first < 1:
                found.append(SeparationViolation("noncontractible_start", orbit.name, c, ks[0], mu_first))
            for prev, nxt in zip(ks, ks[1:]):
                mu_prev, mu_next = cz_index(orbit, prev), cz_index(orbit, nxt)
                if mu_next != mu_prev + 4:
                    found.append(
                        SeparationViolation("increment", orbit.name, c, nxt, mu_next, prev, mu_prev)
                    )
            for violation in found:
                action = iterate_action(orbit, violation.k)
                if first_bad is None or action < first_bad:
                    first_bad = action
            violations.extend(found)

    report = SeparationReport(not violations, tuple(violations), k_cap, cap, first_bad)
    if report.passed and not is_dynamically_convex(orbit_set, k_cap, cap).passed:
        raise RuntimeError("Orbit set is dynamically separated but not dynamically convex")
    logger.debug("Separation check: %d violations", len(violations))
    return report
