"""Enumeration and classification of genus-0 buildings over an orbit set.

Components are abstract: a kind, one positive end, a list of negative ends
and the Fredholm index of those ends. A building is a stack of levels whose
negative ends are matched to the positive ends of the next level.

The enumerator fixes the top orbit X (and the bottom orbit Y when one negative
end is requested) so that the total index μ(X) − 1 or μ(X) − μ(Y) equals the
target, then grows levels downward. Every open end carries a role: CAP ends
must eventually be closed off by planes, the single CHAIN end must reach Y.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import StrEnum
from itertools import combinations_with_replacement, product
from typing import Any, Iterator

from cylhom.dynamics import CONTRACTIBLE, ClassLabel, OrbitSet, is_dynamically_convex, is_dynamically_separated
from cylhom.indices import (
    BaseKind,
    CoverData,
    PunctureConfig,
    cover_index_lower_bound,
    fredholm_index,
    trivial_cover_index,
)
from cylhom.orbits import OrbitIterate, RotationModel

logger = logging.getLogger(__name__)


class ComponentKind(StrEnum):
    SOMEWHERE_INJECTIVE = "somewhere_injective"
    COVER_OF_NONTRIVIAL_CYLINDER = "cover_of_nontrivial_cylinder"
    COVER_OF_TRIVIAL_CYLINDER = "cover_of_trivial_cylinder"
    TRIVIAL_CYLINDER = "trivial_cylinder"


class Index2Type(StrEnum):
    TYPE_I = "type_i"
    TYPE_II = "type_ii"
    TYPE_III = "type_iii"
    EXCLUDED = "excluded"


_BUDGET_KEYS = {
    "levels": "max_levels",
    "cover": "max_cover_degree",
    "branch": "max_branch",
    "components": "max_components_per_level",
}


def parse_budget_items(text: str) -> dict[str, int]:
    """Split "levels=3,cover=4" into {"levels": 3, "cover": 4}."""
    values: dict[str, int] = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in _BUDGET_KEYS:
            raise ValueError(f"Bad budget entry {item!r}; keys are {', '.join(_BUDGET_KEYS)}")
        try:
            values[key] = int(raw)
        except ValueError:
            raise ValueError(f"Budget {key} must be an integer, got {raw.strip()!r}") from None
    return values


@dataclass(frozen=True)
class Budgets:
    max_levels: int = 3
    max_cover_degree: int = 4
    max_branch: int = 2
    max_components_per_level: int = 3

    def __post_init__(self) -> None:
        negative = [short for short, attr in _BUDGET_KEYS.items() if getattr(self, attr) < 0]
        if negative:
            raise ValueError(f"Budgets must be >= 0: {', '.join(negative)}")

    @classmethod
    def parse(cls, text: str) -> Budgets:
        """Parse "levels=3,cover=4,branch=2,components=3"; omitted keys keep defaults."""
        return cls.from_mapping(parse_budget_items(text))

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> Budgets:
        """Build from short keys (levels, cover, branch, components)."""
        unknown = sorted(set(values) - set(_BUDGET_KEYS))
        if unknown:
            raise ValueError(f"Unknown budget keys: {', '.join(unknown)}")
        bad = [k for k, v in values.items() if not isinstance(v, int) or isinstance(v, bool)]
        if bad:
            raise ValueError(f"Budgets must be integers: {', '.join(bad)}")
        return cls(**{_BUDGET_KEYS[k]: v for k, v in values.items()})

    def as_dict(self) -> dict[str, int]:
        return {short: getattr(self, attr) for short, attr in _BUDGET_KEYS.items()}

    def __str__(self) -> str:
        return ",".join(f"{k}={v}" for k, v in self.as_dict().items())


# --- Components and buildings ---


@dataclass(frozen=True)
class CurveComponent:
    kind: ComponentKind
    config: PunctureConfig
    index: int
    index_lb: int
    cover: CoverData | None = None

    def __post_init__(self) -> None:
        if self.kind == ComponentKind.TRIVIAL_CYLINDER:
            if not self.config.is_cylinder or self.config.negatives[0] != self.config.positive or self.index != 0:
                raise ValueError(f"Not a trivial cylinder: {self.config}")
        if self.index < self.index_lb:
            raise ValueError(f"Component {self.config} has index {self.index} below its bound {self.index_lb}")

    @property
    def positive(self) -> OrbitIterate:
        return self.config.positive

    @property
    def negatives(self) -> tuple[OrbitIterate, ...]:
        return self.config.negatives

    @property
    def is_trivial(self) -> bool:
        return self.kind == ComponentKind.TRIVIAL_CYLINDER

    def key(self) -> tuple[Any, ...]:
        return (
            self.positive.sort_key(),
            tuple(n.sort_key() for n in self.negatives),
            self.kind.value,
            self.index,
        )

    def __str__(self) -> str:
        return f"{self.kind.value}{self.config} ind={self.index}"


def trivial_cylinder(end: OrbitIterate) -> CurveComponent:
    return CurveComponent(ComponentKind.TRIVIAL_CYLINDER, PunctureConfig(end, (end,)), 0, 0)


@dataclass(frozen=True)
class Building:
    """Levels top to bottom; matchings[i][e] is the level-(i+1) component on negative end e of level i."""

    levels: tuple[tuple[CurveComponent, ...], ...]
    matchings: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("A building needs at least one level")
        if len(self.matchings) != len(self.levels) - 1:
            raise ValueError("Need one matching per pair of adjacent levels")
        for i, level in enumerate(self.levels):
            if all(c.is_trivial for c in level):
                raise ValueError(f"Level {i + 1} has no nontrivial component")
        for i, matching in enumerate(self.matchings):
            ends = [n for c in self.levels[i] for n in c.negatives]
            below = self.levels[i + 1]
            if sorted(matching) != list(range(len(below))) or len(matching) != len(ends):
                raise ValueError(f"Matching {i + 1} is not a bijection")
            for e, target in enumerate(matching):
                if below[target].positive != ends[e]:
                    raise ValueError(f"Matching {i + 1} pairs {ends[e]} with {below[target].positive}")

    @property
    def index(self) -> int:
        return sum(c.index for level in self.levels for c in level)

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def positive_ends(self) -> tuple[OrbitIterate, ...]:
        return tuple(c.positive for c in self.levels[0])

    @property
    def negative_ends(self) -> tuple[OrbitIterate, ...]:
        return tuple(n for c in self.levels[-1] for n in c.negatives)

    @property
    def nontrivial_components(self) -> tuple[tuple[int, CurveComponent], ...]:
        """(level number, component) pairs, top level first."""
        return tuple((i, c) for i, level in enumerate(self.levels) for c in level if not c.is_trivial)

    def key(self) -> tuple[Any, ...]:
        return tuple(_tree_key(tree) for tree in _trees(self))

    def describe(self) -> str:
        return " | ".join(
            f"L{i + 1}: " + ", ".join(str(c) for c in level) for i, level in enumerate(self.levels)
        )


# A component with one subtree per negative end (None below the last level).
_Tree = tuple[CurveComponent, tuple[Any, ...]]


def _trees(building: Building) -> list[_Tree]:
    def build(i: int, j: int) -> _Tree:
        comp = building.levels[i][j]
        if i + 1 == len(building.levels):
            return (comp, tuple(None for _ in comp.negatives))
        offset = sum(len(c.negatives) for c in building.levels[i][:j])
        matching = building.matchings[i]
        return (comp, tuple(build(i + 1, matching[offset + e]) for e in range(len(comp.negatives))))

    return [build(0, j) for j in range(len(building.levels[0]))]


def _tree_key(tree: _Tree | None) -> tuple[Any, ...]:
    if tree is None:
        return ()
    comp, children = tree
    pairs = sorted((end.sort_key(), _tree_key(child)) for end, child in zip(comp.negatives, children))
    return (comp.key(), tuple(pairs))


def _canonical_tree(tree: _Tree) -> _Tree:
    """Order the subtrees of equal negative ends by their keys."""
    comp, children = tree
    pairs = sorted(
        zip(comp.negatives, children),
        key=lambda pair: (pair[0].sort_key(), _tree_key(pair[1])),
    )
    return (comp, tuple(None if child is None else _canonical_tree(child) for _, child in pairs))


def _from_levels(levels: list[tuple[CurveComponent, ...]]) -> Building:
    """Canonical building from levels matched in end order."""
    matchings = tuple(tuple(range(len(level))) for level in levels[1:])
    raw = Building(tuple(levels), matchings)
    roots = [_canonical_tree(tree) for tree in _trees(raw)]
    out_levels: list[tuple[CurveComponent, ...]] = []
    current: list[_Tree] = roots
    while current:
        out_levels.append(tuple(comp for comp, _ in current))
        current = [child for _, children in current for child in children if child is not None]
    return Building(tuple(out_levels), tuple(tuple(range(len(level))) for level in out_levels[1:]))


# --- Component catalog ---


def _partitions(k: int, max_parts: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of k into at most max_parts parts, parts nonincreasing."""
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, max_parts - 1, first):
            yield (first, *rest)


class _Catalog:
    """Nontrivial components with a given positive end, built lazily within budgets."""

    def __init__(self, orbit_set: OrbitSet, budgets: Budgets) -> None:
        self.orbit_set = orbit_set
        self.budgets = budgets
        self.universe = orbit_set.iterates()
        self._members = set(self.universe)
        self._classes: dict[OrbitIterate, ClassLabel] = {it: orbit_set.class_of(it) for it in self.universe}
        self._cache: dict[OrbitIterate, tuple[CurveComponent, ...]] = {}
        # Positive ends for which the cover budgets dropped shapes.
        self.truncated: set[OrbitIterate] = set()

    def class_of(self, it: OrbitIterate) -> ClassLabel:
        label = self._classes.get(it)
        return self.orbit_set.class_of(it) if label is None else label

    def below(self, top: OrbitIterate) -> list[OrbitIterate]:
        return [it for it in self.universe if it.action < top.action]

    def _combines(self, top: OrbitIterate, negatives: tuple[OrbitIterate, ...]) -> bool:
        return self.orbit_set.homotopy.combines(self.class_of(top), [self.class_of(n) for n in negatives])

    def components(self, top: OrbitIterate) -> tuple[CurveComponent, ...]:
        cached = self._cache.get(top)
        if cached is None:
            cached = self._build(top)
            self._cache[top] = cached
        return cached

    def _build(self, top: OrbitIterate) -> tuple[CurveComponent, ...]:
        found: dict[tuple[Any, ...], CurveComponent] = {}

        def add(component: CurveComponent) -> None:
            key = (component.kind, component.config.negatives)
            found.setdefault(key, component)

        below = self.below(top)
        max_ends = self.budgets.max_components_per_level

        for m in range(max_ends + 1):
            for negatives in combinations_with_replacement(below, m):
                if m == 0 and self.class_of(top) != CONTRACTIBLE:
                    continue
                if m and not self._combines(top, negatives):
                    continue
                config = PunctureConfig(top, negatives)
                index = fredholm_index(config)
                if index >= 1:
                    add(CurveComponent(ComponentKind.SOMEWHERE_INJECTIVE, config, index, 1))

        for component in self._trivial_covers(top):
            add(component)
        for component in self._cylinder_covers(top):
            add(component)

        result = tuple(sorted(found.values(), key=CurveComponent.key))
        logger.debug("Catalog for %s: %d components", top, len(result))
        return result

    def _max_parts(self) -> int:
        return min(self.budgets.max_branch + 1, self.budgets.max_components_per_level)

    def _trivial_covers(self, top: OrbitIterate) -> Iterator[CurveComponent]:
        if top.k < 2:
            return
        max_parts = self._max_parts()
        if top.k > self.budgets.max_cover_degree or top.k > max_parts:
            self.truncated.add(top)
        if top.k > self.budgets.max_cover_degree:
            return
        orbit = top.orbit
        simple = orbit.iterate(1)
        for parts in _partitions(top.k, max_parts):
            if len(parts) < 2:
                continue
            negatives = tuple(orbit.iterate(p) for p in sorted(parts))
            if not self._combines(top, negatives):
                continue
            index = trivial_cover_index(orbit, parts)
            if index < 0:
                logger.debug("Dropping trivial cylinder cover %s with index %d", negatives, index)
                continue
            cover = CoverData(top.k, len(parts) - 1, PunctureConfig(simple, (simple,)), BaseKind.TRIVIAL_CYLINDER)
            yield CurveComponent(
                ComponentKind.COVER_OF_TRIVIAL_CYLINDER,
                PunctureConfig(top, negatives),
                index,
                cover_index_lower_bound(cover),
                cover,
            )

    def _cylinder_covers(self, top: OrbitIterate) -> Iterator[CurveComponent]:
        max_parts = self._max_parts()
        divisors = [p for p in range(top.k - 1, 0, -1) if top.k % p == 0]
        for p in divisors:
            degree = top.k // p
            if degree > self.budgets.max_cover_degree:
                self.truncated.add(top)
                continue
            if degree > max_parts:
                self.truncated.add(top)
            x = top.orbit.iterate(p)
            for y in self.below(x):
                if not self._combines(x, (y,)):
                    continue
                base = PunctureConfig(x, (y,))
                if fredholm_index(base) < 1:
                    continue
                for parts in _partitions(degree, max_parts):
                    negatives = tuple(y.orbit.iterate(y.k * part) for part in sorted(parts))
                    if any(n not in self._members for n in negatives):
                        continue
                    if not self._combines(top, negatives):
                        continue
                    config = PunctureConfig(top, negatives)
                    index = fredholm_index(config)
                    cover = CoverData(degree, len(parts) - 1, base, BaseKind.NONTRIVIAL_CYLINDER)
                    bound = cover_index_lower_bound(cover)
                    if index < bound:
                        if isinstance(x.orbit.cz, RotationModel) and isinstance(y.orbit.cz, RotationModel):
                            raise RuntimeError(f"Cover {config} of {base} has index {index} below {bound}")
                        logger.debug("Dropping cover %s with index %d below %d", config, index, bound)
                        continue
                    yield CurveComponent(ComponentKind.COVER_OF_NONTRIVIAL_CYLINDER, config, index, bound, cover)


# --- Enumeration ---


@dataclass(frozen=True)
class EnumerationResult:
    buildings: tuple[Building, ...]
    incomplete: bool
    budgets: Budgets
    target_index: int
    negative_ends: int


Start = tuple[OrbitIterate, OrbitIterate | None]


class _Search:
    def __init__(self, orbit_set: OrbitSet, budgets: Budgets) -> None:
        self.catalog = _Catalog(orbit_set, budgets)
        self.budgets = budgets
        self.incomplete = False
        self.found: dict[tuple[Any, ...], Building] = {}

    def _cut(self, reason: str, detail: object) -> None:
        if not self.incomplete:
            logger.info("Search truncated by %s budget at %s", reason, detail)
        self.incomplete = True

    def _rem(self, end: OrbitIterate, chain: bool, bottom: OrbitIterate | None) -> int:
        if chain:
            assert bottom is not None
            return end.cz - bottom.cz
        return end.cz - 1

    def _viable(self, end: OrbitIterate, chain: bool, bottom: OrbitIterate | None) -> bool:
        if not chain:
            return self.catalog.class_of(end) == CONTRACTIBLE and end.cz - 1 >= 1
        assert bottom is not None
        if end == bottom:
            return True
        return (
            self.catalog.class_of(end) == self.catalog.class_of(bottom)
            and end.action > bottom.action
            and end.cz - bottom.cz >= 1
        )

    def _note_truncation(self, end: OrbitIterate, chain: bool, rem: int) -> None:
        if end in self.catalog.truncated and rem >= 1:
            self._cut("cover", end)
        # One more negative end than the budget allows would need this much index.
        needed = self.budgets.max_components_per_level + (1 if chain else 2)
        if rem >= needed:
            self._cut("components", end)

    def _options(
        self, end: OrbitIterate, chain: bool, bottom: OrbitIterate | None
    ) -> list[tuple[CurveComponent, tuple[bool, ...]]]:
        options = [(trivial_cylinder(end), (chain,))]
        if chain and end == bottom:
            return options
        components = self.catalog.components(end)
        self._note_truncation(end, chain, self._rem(end, chain, bottom))
        for comp in components:
            negatives = comp.negatives
            if not chain:
                if all(self._viable(n, False, bottom) for n in negatives):
                    options.append((comp, tuple(False for _ in negatives)))
                continue
            tried: set[OrbitIterate] = set()
            for j, candidate in enumerate(negatives):
                if candidate in tried:
                    continue
                tried.add(candidate)
                if not self._viable(candidate, True, bottom):
                    continue
                if all(self._viable(n, False, bottom) for i, n in enumerate(negatives) if i != j):
                    options.append((comp, tuple(i == j for i in range(len(negatives)))))
        return options

    def run(self, start: Start) -> None:
        top, bottom = start
        self._expand([], [(top, bottom is not None)], bottom)

    def _expand(
        self,
        levels: list[tuple[CurveComponent, ...]],
        opens: list[tuple[OrbitIterate, bool]],
        bottom: OrbitIterate | None,
    ) -> None:
        if levels and all(chain and end == bottom for end, chain in opens):
            building = _from_levels(levels)
            self.found.setdefault(building.key(), building)
            return
        if len(levels) >= self.budgets.max_levels:
            self._cut("levels", opens[0][0])
            return
        if len(opens) > self.budgets.max_components_per_level:
            self._cut("components", opens[0][0])
            return
        choices = [self._options(end, chain, bottom) for end, chain in opens]
        for choice in product(*choices):
            if all(comp.is_trivial for comp, _ in choice):
                continue
            level = tuple(comp for comp, _ in choice)
            next_opens = [
                (end, role)
                for comp, roles in choice
                for end, role in zip(comp.negatives, roles)
            ]
            self._expand([*levels, level], next_opens, bottom)


def _starts(
    catalog: _Catalog,
    target_index: int,
    negative_ends: int,
) -> list[Start]:
    universe = catalog.universe
    if negative_ends == 0:
        return [
            (x, None)
            for x in universe
            if catalog.class_of(x) == CONTRACTIBLE and x.cz - 1 == target_index
        ]
    return [
        (x, y)
        for x in universe
        for y in universe
        if y != x
        and y.action < x.action
        and catalog.class_of(x) == catalog.class_of(y)
        and x.cz - y.cz == target_index
    ]


def _search_starts(
    orbit_set: OrbitSet,
    budgets: Budgets,
    starts: list[Start],
) -> tuple[list[tuple[tuple[Any, ...], Building]], bool]:
    search = _Search(orbit_set, budgets)
    for start in starts:
        search.run(start)
    return list(search.found.items()), search.incomplete


def _check_request(orbit_set: OrbitSet, negative_ends: int) -> None:
    if negative_ends not in (0, 1):
        raise ValueError(f"negative_ends must be 0 or 1, got {negative_ends}")
    if orbit_set.action_cap is None and orbit_set.homotopy.k_bound() is None:
        raise ValueError("Building enumeration needs a finite action cap on the orbit set")


def enumerate_buildings(
    orbit_set: OrbitSet,
    target_index: int,
    negative_ends: int,
    budgets: Budgets | None = None,
    *,
    workers: int = 1,
    between: tuple[OrbitIterate, OrbitIterate] | None = None,
) -> EnumerationResult:
    """All buildings of the given index with one positive end, canonically ordered.

    Args:
        orbit_set: Orbits to build from; needs a finite action cap.
        target_index: Total Fredholm index of the buildings sought.
        negative_ends: 0 for planes, 1 for cylinders.
        budgets: Search limits; the defaults when omitted.
        workers: Processes to shard the start list over.
        between: Restrict the search to buildings from x down to z.

    Returns:
        The buildings found, with ``incomplete`` set if any budget cut a branch.

    Raises:
        ValueError: If negative_ends is not 0 or 1, or the orbit set is unbounded.
    """
    budgets = budgets or Budgets()
    _check_request(orbit_set, negative_ends)
    catalog = _Catalog(orbit_set, budgets)
    if between is not None:
        starts: list[Start] = [between]
    else:
        starts = _starts(catalog, target_index, negative_ends)
    logger.debug("Enumerating index %d with %d start(s)", target_index, len(starts))

    found: dict[tuple[Any, ...], Building] = {}
    incomplete = False
    if workers > 1 and len(starts) > 1:
        shards = [starts[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_search_starts, orbit_set, budgets, shard) for shard in shards if shard]
            for future in futures:
                items, cut = future.result()
                found.update(items)
                incomplete = incomplete or cut
    else:
        items, incomplete = _search_starts(orbit_set, budgets, starts)
        found.update(items)

    buildings = tuple(found[key] for key in sorted(found))
    return EnumerationResult(buildings, incomplete, budgets, target_index, negative_ends)


def enumerate_buildings_unpruned(
    orbit_set: OrbitSet,
    target_index: int,
    negative_ends: int,
    budgets: Budgets | None = None,
) -> EnumerationResult:
    """Generate every stack within budgets, then filter by index and ends."""
    budgets = budgets or Budgets()
    _check_request(orbit_set, negative_ends)
    catalog = _Catalog(orbit_set, budgets)
    found: dict[tuple[Any, ...], Building] = {}
    incomplete = False

    for top in catalog.universe:
        frontier: list[tuple[list[tuple[CurveComponent, ...]], list[OrbitIterate]]] = [([], [top])]
        for _depth in range(budgets.max_levels):
            grown: list[tuple[list[tuple[CurveComponent, ...]], list[OrbitIterate]]] = []
            for levels, opens in frontier:
                if not opens:
                    continue
                if len(opens) > budgets.max_components_per_level:
                    incomplete = True
                    continue
                choices = [(trivial_cylinder(end), *catalog.components(end)) for end in opens]
                for choice in product(*choices):
                    if all(comp.is_trivial for comp in choice):
                        continue
                    new_levels = [*levels, tuple(choice)]
                    new_opens = [n for comp in choice for n in comp.negatives]
                    index = sum(comp.index for level in new_levels for comp in level)
                    if len(new_opens) == negative_ends and index == target_index:
                        building = _from_levels(new_levels)
                        found.setdefault(building.key(), building)
                    grown.append((new_levels, new_opens))
            frontier = grown
        incomplete = incomplete or any(opens for _, opens in frontier)

    buildings = tuple(found[key] for key in sorted(found))
    return EnumerationResult(buildings, incomplete, budgets, target_index, negative_ends)


# --- Classification ---


def classify_index2(building: Building) -> Index2Type:
    """Sort an index-2 building with one positive and one negative end into its degeneration type."""
    if building.index != 2 or len(building.positive_ends) != 1 or len(building.negative_ends) != 1:
        raise ValueError(
            f"Need an index-2 building with one positive and one negative end, got {building.describe()}"
        )
    nontrivial = building.nontrivial_components
    if len(nontrivial) == 1:
        ((_, comp),) = nontrivial
        if len(comp.negatives) == 1 and comp.index == 2:
            return Index2Type.TYPE_I
        return Index2Type.EXCLUDED
    if len(nontrivial) != 2:
        return Index2Type.EXCLUDED

    (upper_level, upper), (lower_level, lower) = nontrivial
    if (
        len(upper.negatives) == 1
        and len(lower.negatives) == 1
        and upper.index == 1
        and lower.index == 1
        and upper.negatives[0] == lower.positive
    ):
        return Index2Type.TYPE_II
    if upper_level < lower_level and _is_pants_over_one_orbit(upper) and upper.index == 0:
        if not lower.negatives and lower.index == 2 and lower.positive in upper.negatives:
            return Index2Type.TYPE_III
    return Index2Type.EXCLUDED


def _is_pants_over_one_orbit(comp: CurveComponent) -> bool:
    if len(comp.negatives) != 2:
        return False
    top = comp.positive
    return all(n.orbit == top.orbit for n in comp.negatives) and sum(n.k for n in comp.negatives) == top.k


@dataclass(frozen=True)
class ClassifiedBuilding:
    building: Building
    kind: Index2Type


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    applicable: bool
    counterexamples: tuple[Building, ...]
    detail: str = ""


@dataclass(frozen=True)
class LemmaCertificate:
    budgets: Budgets
    dynamically_convex: bool
    dynamically_separated: bool
    checks: tuple[LemmaCheck, ...]
    classified: tuple[ClassifiedBuilding, ...]
    incomplete: bool

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> LemmaCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def type_counts(self) -> dict[Index2Type, int]:
        counts = {kind: 0 for kind in Index2Type}
        for item in self.classified:
            counts[item.kind] += 1
        return counts


def _is_single(building: Building, negatives: int) -> bool:
    return (
        building.height == 1
        and len(building.levels[0]) == 1
        and len(building.levels[0][0].negatives) == negatives
    )


def _low_targets(values: set[int], limit: int) -> list[int]:
    return sorted(v for v in values if v <= limit)


def verify_lemmas(orbit_set: OrbitSet, budgets: Budgets | None = None, *, workers: int = 1) -> LemmaCertificate:
    """Check the plane, cylinder and index-2 degeneration statements within budgets.

    Args:
        orbit_set: Orbits to test; needs a finite action cap.
        budgets: Search limits shared by every enumeration run.
        workers: Processes per enumeration.

    Returns:
        A certificate with one LemmaCheck per statement and the classified
        index-2 buildings. Checks are vacuous when the set is not
        dynamically convex; see ``LemmaCheck.applicable``.
    """
    budgets = budgets or Budgets()
    _check_request(orbit_set, 0)
    catalog = _Catalog(orbit_set, budgets)
    universe = catalog.universe
    k_cap = max((it.k for it in universe), default=1)
    convex = is_dynamically_convex(orbit_set, k_cap).passed
    separated = is_dynamically_separated(orbit_set, k_cap).passed
    incomplete = False

    # Planes: index >= 2, and index 2 only for a single plane.
    plane_targets = _low_targets(
        {x.cz - 1 for x in universe if catalog.class_of(x) == CONTRACTIBLE}, 2
    )
    plane_bad: list[Building] = []
    for target in plane_targets:
        result = enumerate_buildings(orbit_set, target, 0, budgets, workers=workers)
        incomplete = incomplete or result.incomplete
        plane_bad.extend(b for b in result.buildings if b.index < 2 or not _is_single(b, 0))

    # Cylinders: index >= 1, and index 1 only for a single cylinder.
    cylinder_targets = _low_targets(
        {
            x.cz - y.cz
            for x in universe
            for y in universe
            if y.action < x.action and catalog.class_of(x) == catalog.class_of(y)
        },
        1,
    )
    cylinder_bad: list[Building] = []
    for target in cylinder_targets:
        result = enumerate_buildings(orbit_set, target, 1, budgets, workers=workers)
        incomplete = incomplete or result.incomplete
        cylinder_bad.extend(b for b in result.buildings if b.index < 1 or not _is_single(b, 1))

    index_two = enumerate_buildings(orbit_set, 2, 1, budgets, workers=workers)
    incomplete = incomplete or index_two.incomplete
    classified = tuple(ClassifiedBuilding(b, classify_index2(b)) for b in index_two.buildings)
    excluded = [c.building for c in classified if c.kind == Index2Type.EXCLUDED]
    pants = [c.building for c in classified if c.kind == Index2Type.TYPE_III]

    checks = (
        LemmaCheck("planes", not plane_bad, convex, tuple(plane_bad), f"targets {plane_targets}"),
        LemmaCheck("cylinders", not cylinder_bad, convex, tuple(cylinder_bad), f"targets {cylinder_targets}"),
        LemmaCheck("index_two_shapes", not excluded, convex, tuple(excluded)),
        LemmaCheck(
            "no_pants_when_separated",
            not (separated and pants),
            separated,
            tuple(pants) if separated else (),
            "" if separated else "not dynamically separated; pants configurations allowed",
        ),
    )
    for check in checks:
        if not check.passed:
            logger.info("Check %s failed with %d counterexample(s)", check.name, len(check.counterexamples))
    return LemmaCertificate(budgets, convex, separated, checks, classified, incomplete)


@dataclass(frozen=True)
class ConditionDCertificate:
    x: OrbitIterate
    z: OrbitIterate
    passed: bool
    classified: tuple[ClassifiedBuilding, ...]
    intermediates: tuple[OrbitIterate, ...]
    budgets: Budgets
    incomplete: bool


def verify_condition_D(
    orbit_set: OrbitSet,
    x: OrbitIterate,
    z: OrbitIterate,
    budgets: Budgets | None = None,
) -> ConditionDCertificate:
    """Every index-2 limit from x to z is an unbroken cylinder or breaks once at some y."""
    budgets = budgets or Budgets()
    _check_request(orbit_set, 1)
    if x.cz - z.cz != 2:
        raise ValueError(f"Need μ({x}) − μ({z}) = 2, got {x.cz - z.cz}")
    if orbit_set.class_of(x) != orbit_set.class_of(z):
        raise ValueError(f"{x} and {z} lie in different free homotopy classes")
    universe = orbit_set.iterates()
    for end in (x, z):
        if end not in universe:
            raise ValueError(f"{end} is beyond the action cap of the orbit set")
    if not z.action < x.action:
        raise ValueError(f"Need A({z}) < A({x})")

    result = enumerate_buildings(orbit_set, 2, 1, budgets, between=(x, z))
    classified = tuple(ClassifiedBuilding(b, classify_index2(b)) for b in result.buildings)
    passed = all(c.kind in (Index2Type.TYPE_I, Index2Type.TYPE_II) for c in classified)
    label = orbit_set.class_of(x)
    intermediates = tuple(
        y
        for y in universe
        if orbit_set.class_of(y) == label and y.cz == x.cz - 1 and z.action < y.action < x.action
    )
    return ConditionDCertificate(x, z, passed, classified, intermediates, budgets, result.incomplete)
