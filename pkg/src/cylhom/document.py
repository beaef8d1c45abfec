"""JSON input documents and machine-readable reports.

Rationals travel as strings ("p/q"), rotation numbers as "p/q", "p/q-eps" or
"p/q+eps". Unknown fields are rejected everywhere.
"""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cylhom.buildings import (
    Building,
    ClassifiedBuilding,
    ConditionDCertificate,
    EnumerationResult,
    Index2Type,
    LemmaCertificate,
    LemmaCheck,
    classify_index2,
)
from cylhom.chain import Coefficients, DSquaredResult, HomologyResult, ModuliInput, ModuliRecord, Variant
from cylhom.dynamics import (
    ConvexityReport,
    CyclicHomotopy,
    FreeHomotopyModel,
    OrbitSet,
    SeparationReport,
    TableHomotopy,
    TrivialHomotopy,
)
from cylhom.indices import RegularityReport
from cylhom.models import CobordismTable
from cylhom.orbits import OrbitIterate, OrbitType, Parity, PeriodicAffineModel, RotationModel, RotationNumber, SimpleOrbit
from cylhom.rationals import format_cap, format_fraction, parse_cap, parse_fraction

SCHEMA_VERSION = "1"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# --- Input ---


class RotationCz(_Strict):
    kind: Literal["rotation"]
    rotation: str

    @field_validator("rotation")
    @classmethod
    def _parse_rotation(cls, value: str) -> str:
        return str(RotationNumber.parse(value))

    def to_model(self) -> RotationModel:
        return RotationModel(RotationNumber.parse(self.rotation))


class PeriodicCz(_Strict):
    kind: Literal["periodic"]
    period: int = Field(ge=1)
    residues: list[int]
    increment: int

    def to_model(self) -> PeriodicAffineModel:
        return PeriodicAffineModel(self.period, tuple(self.residues), self.increment)


CzSpec = Annotated[RotationCz | PeriodicCz, Field(discriminator="kind")]


def _check_fraction(value: str) -> str:
    return format_fraction(parse_fraction(value))


class OrbitSpec(_Strict):
    name: str = Field(min_length=1)
    type: OrbitType
    cz: CzSpec
    action: str
    homotopy_seed: int | str = 0

    @field_validator("action")
    @classmethod
    def _parse_action(cls, value: str) -> str:
        if parse_fraction(value) <= 0:
            raise ValueError("action must be positive")
        return _check_fraction(value)

    def to_orbit(self) -> SimpleOrbit:
        return SimpleOrbit(
            name=self.name,
            orbit_type=self.type,
            cz=self.cz.to_model(),
            action=parse_fraction(self.action),
            homotopy_seed=self.homotopy_seed,
        )


class TableEntry(_Strict):
    orbit: str
    k: int = Field(ge=1)
    label: int | str


class HomotopySpec(_Strict):
    model: Literal["trivial", "cyclic", "table"] = "trivial"
    order: int | None = None
    bound: int | None = None
    entries: list[TableEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_parameters(self) -> HomotopySpec:
        if self.model == "cyclic" and self.order is None:
            raise ValueError("cyclic homotopy model needs 'order'")
        if self.model == "table" and self.bound is None:
            raise ValueError("table homotopy model needs 'bound'")
        return self

    def to_model(self) -> FreeHomotopyModel:
        match self.model:
            case "cyclic":
                assert self.order is not None
                return CyclicHomotopy(self.order)
            case "table":
                assert self.bound is not None
                return TableHomotopy(self.bound, tuple((e.orbit, e.k, e.label) for e in self.entries))
        return TrivialHomotopy()


class OrbitSetSpec(_Strict):
    orbits: list[OrbitSpec] = Field(default_factory=list)
    homotopy: HomotopySpec = Field(default_factory=HomotopySpec)
    action_cap: str | None = None
    notes: str = ""

    @field_validator("action_cap")
    @classmethod
    def _parse_cap(cls, value: str | None) -> str | None:
        return format_cap(parse_cap(value))

    def to_orbit_set(self) -> OrbitSet:
        return OrbitSet(
            tuple(spec.to_orbit() for spec in self.orbits),
            self.homotopy.to_model(),
            parse_cap(self.action_cap),
            self.notes,
        )


class IterateRef(_Strict):
    orbit: str
    k: int = Field(default=1, ge=1)

    @classmethod
    def parse(cls, text: str) -> IterateRef:
        """Parse "name" or "name^k"."""
        name, sep, power = text.strip().partition("^")
        if not name:
            raise ValueError(f"Malformed iterate {text!r} (expected name or name^k)")
        if not sep:
            return cls(orbit=name)
        try:
            return cls(orbit=name, k=int(power))
        except ValueError:
            raise ValueError(f"Malformed iterate {text!r} (expected name or name^k)") from None

    def resolve(self, orbit_set: OrbitSet) -> OrbitIterate:
        return orbit_set.orbit(self.orbit).iterate(self.k)


class ModuliRecordSpec(_Strict):
    x: IterateRef
    y: IterateRef
    sign: Literal[-1, 1]
    multiplicity: int = Field(default=1, ge=1)


class Params(_Strict):
    """Optional command parameters; CLI flags take precedence."""

    k_max: int | None = Field(default=None, ge=1)
    degrees: str | None = None
    variant: Variant | None = None
    coefficients: Coefficients | None = None
    target_index: int | None = None
    negative_ends: Literal[0, 1] | None = None
    budgets: str | None = None
    x: IterateRef | None = None
    z: IterateRef | None = None


class Document(_Strict):
    version: Literal["1"] = SCHEMA_VERSION
    orbit_set: OrbitSetSpec = Field(default_factory=OrbitSetSpec)
    moduli: list[ModuliRecordSpec] = Field(default_factory=list)
    params: Params = Field(default_factory=Params)

    def to_orbit_set(self) -> OrbitSet:
        return self.orbit_set.to_orbit_set()

    def to_moduli(self, orbit_set: OrbitSet) -> ModuliInput:
        return ModuliInput(
            tuple(
                ModuliRecord(r.x.resolve(orbit_set), r.y.resolve(orbit_set), r.sign, r.multiplicity)
                for r in self.moduli
            )
        )


def load_document(path: Path) -> Document:
    """Read and schema-validate a JSON document."""
    return Document.model_validate_json(path.read_text(encoding="utf-8"))


def document_schema() -> dict[str, object]:
    return Document.model_json_schema()


# --- Reports ---


class _Report(_Strict):
    version: Literal["1"] = SCHEMA_VERSION


class CzRow(_Strict):
    orbit: str
    k: int
    cz: int
    grading: int
    parity: Parity
    bad: bool
    action: str
    homotopy_class: int | str


class CzReport(_Report):
    k_max: int
    rows: list[CzRow]


def cz_report(orbit_set: OrbitSet, k_max: int) -> CzReport:
    """One row per orbit and k <= k_max, in document order."""
    bound = orbit_set.homotopy.k_bound()
    limit = k_max if bound is None else min(k_max, bound)
    rows = [
        CzRow(
            orbit=orbit.name,
            k=k,
            cz=it.cz,
            grading=it.grading,
            parity=it.parity,
            bad=it.is_bad,
            action=format_fraction(it.action),
            homotopy_class=orbit_set.class_of(it),
        )
        for orbit in orbit_set.orbits
        for k in range(1, limit + 1)
        for it in (orbit.iterate(k),)
    ]
    return CzReport(k_max=k_max, rows=rows)


class ConvexityViolationOut(_Strict):
    orbit: str
    k: int
    cz: int


class ConvexityOut(_Strict):
    passed: bool
    k_cap: int
    action_cap: str
    violations: list[ConvexityViolationOut]


class SeparationViolationOut(_Strict):
    condition: str
    orbit: str
    homotopy_class: int | str
    k: int
    cz: int
    previous_k: int | None = None
    previous_cz: int | None = None


class SeparationOut(_Strict):
    passed: bool
    k_cap: int
    action_cap: str
    separated_below: str | None
    violations: list[SeparationViolationOut]


class ClassifyReport(_Report):
    convexity: ConvexityOut
    separation: SeparationOut


def classify_report(convexity: ConvexityReport, separation: SeparationReport) -> ClassifyReport:
    return ClassifyReport(
        convexity=ConvexityOut(
            passed=convexity.passed,
            k_cap=convexity.k_cap,
            action_cap=format_cap(convexity.action_cap),
            violations=[ConvexityViolationOut(orbit=v.orbit, k=v.k, cz=v.cz) for v in convexity.violations],
        ),
        separation=SeparationOut(
            passed=separation.passed,
            k_cap=separation.k_cap,
            action_cap=format_cap(separation.action_cap),
            separated_below=None if separation.separated_below is None else format_fraction(separation.separated_below),
            violations=[
                SeparationViolationOut(
                    condition=v.condition,
                    orbit=v.orbit,
                    homotopy_class=v.homotopy_class,
                    k=v.k,
                    cz=v.cz,
                    previous_k=v.previous_k,
                    previous_cz=v.previous_cz,
                )
                for v in separation.violations
            ],
        ),
    )


class ComponentOut(_Strict):
    kind: str
    positive: str
    negatives: list[str]
    index: int
    index_lb: int
    cover_degree: int | None = None
    branch_points: int | None = None


class BuildingOut(_Strict):
    index: int
    positive_end: str
    negative_ends: list[str]
    levels: list[list[ComponentOut]]
    type: Index2Type | None = None


def building_out(building: Building, kind: Index2Type | None = None) -> BuildingOut:
    return BuildingOut(
        index=building.index,
        positive_end=", ".join(str(p) for p in building.positive_ends),
        negative_ends=[str(n) for n in building.negative_ends],
        levels=[
            [
                ComponentOut(
                    kind=c.kind.value,
                    positive=str(c.positive),
                    negatives=[str(n) for n in c.negatives],
                    index=c.index,
                    index_lb=c.index_lb,
                    cover_degree=None if c.cover is None else c.cover.k,
                    branch_points=None if c.cover is None else c.cover.b,
                )
                for c in level
            ]
            for level in building.levels
        ],
        type=kind,
    )


class LemmaCheckOut(_Strict):
    name: str
    passed: bool
    applicable: bool
    detail: str
    counterexamples: list[BuildingOut]


class LemmaOut(_Strict):
    passed: bool
    dynamically_convex: bool
    dynamically_separated: bool
    incomplete: bool
    type_counts: dict[str, int]
    checks: list[LemmaCheckOut]


def _check_out(check: LemmaCheck) -> LemmaCheckOut:
    return LemmaCheckOut(
        name=check.name,
        passed=check.passed,
        applicable=check.applicable,
        detail=check.detail,
        counterexamples=[building_out(b) for b in check.counterexamples],
    )


def _type_counts(classified: tuple[ClassifiedBuilding, ...]) -> dict[str, int]:
    counts = {kind.value: 0 for kind in Index2Type}
    for item in classified:
        counts[item.kind.value] += 1
    return counts


class BuildingsReport(_Report):
    target_index: int
    negative_ends: int
    budgets: dict[str, int]
    incomplete: bool
    buildings: list[BuildingOut]
    type_counts: dict[str, int] | None = None
    lemmas: LemmaOut | None = None


def buildings_report(result: EnumerationResult, certificate: LemmaCertificate | None = None) -> BuildingsReport:
    """Index-2 cylinders are classified; other requests list buildings only."""
    classify = result.target_index == 2 and result.negative_ends == 1
    classified = tuple(ClassifiedBuilding(b, classify_index2(b)) for b in result.buildings) if classify else ()
    if classify:
        buildings = [building_out(c.building, c.kind) for c in classified]
    else:
        buildings = [building_out(b) for b in result.buildings]
    lemmas = None
    if certificate is not None:
        lemmas = LemmaOut(
            passed=certificate.passed,
            dynamically_convex=certificate.dynamically_convex,
            dynamically_separated=certificate.dynamically_separated,
            incomplete=certificate.incomplete,
            type_counts=_type_counts(certificate.classified),
            checks=[_check_out(c) for c in certificate.checks],
        )
    return BuildingsReport(
        target_index=result.target_index,
        negative_ends=result.negative_ends,
        budgets=result.budgets.as_dict(),
        incomplete=result.incomplete,
        buildings=buildings,
        type_counts=_type_counts(classified) if classify else None,
        lemmas=lemmas,
    )


class IntermediateOut(_Strict):
    iterate: str
    cz: int
    action: str
    bad: bool


class ConditionDReport(_Report):
    x: str
    z: str
    passed: bool
    incomplete: bool
    budgets: dict[str, int]
    buildings: list[BuildingOut]
    intermediates: list[IntermediateOut]


def condition_d_report(certificate: ConditionDCertificate) -> ConditionDReport:
    return ConditionDReport(
        x=str(certificate.x),
        z=str(certificate.z),
        passed=certificate.passed,
        incomplete=certificate.incomplete,
        budgets=certificate.budgets.as_dict(),
        buildings=[building_out(c.building, c.kind) for c in certificate.classified],
        intermediates=[
            IntermediateOut(iterate=str(y), cz=y.cz, action=format_fraction(y.action), bad=y.is_bad)
            for y in certificate.intermediates
        ],
    )


class WitnessOut(_Strict):
    homotopy_class: int | str
    x: str
    z: str
    value: str
    through: list[str]


class DSquaredOut(_Strict):
    passed: bool
    witness: WitnessOut | None = None


class GroupOut(_Strict):
    homotopy_class: int | str
    degree: int
    rank: int
    edge: bool
    torsion: list[int] = Field(default_factory=list)


class TotalOut(_Strict):
    degree: int
    rank: int
    edge: bool


class HomologyReport(_Report):
    coefficients: Coefficients
    variant: Variant
    degrees: tuple[int, int]
    generators: int
    d_squared: DSquaredOut
    groups: list[GroupOut] = Field(default_factory=list)
    totals: list[TotalOut] = Field(default_factory=list)


def homology_report(
    check: DSquaredResult,
    variant: Variant,
    coefficients: Coefficients,
    degrees: tuple[int, int],
    generators: int,
    result: HomologyResult | None = None,
) -> HomologyReport:
    witness = None
    if check.witness is not None:
        w = check.witness
        witness = WitnessOut(
            homotopy_class=w.homotopy_class,
            x=str(w.x),
            z=str(w.z),
            value=format_fraction(w.value),
            through=[str(y) for y in w.through],
        )
    groups: list[GroupOut] = []
    totals: list[TotalOut] = []
    if result is not None:
        groups = [
            GroupOut(
                homotopy_class=g.homotopy_class,
                degree=g.degree,
                rank=g.rank,
                edge=g.edge,
                torsion=list(g.torsion),
            )
            for g in result.groups
        ]
        totals = [TotalOut(degree=d, rank=r, edge=edge) for d, r, edge in result.totals()]
    return HomologyReport(
        coefficients=coefficients,
        variant=variant,
        degrees=degrees,
        generators=generators,
        d_squared=DSquaredOut(passed=check.passed, witness=witness),
        groups=groups,
        totals=totals,
    )


class IndexReport(_Report):
    config: str
    index: int
    even_ends: int
    normal_chern: str
    z: int
    regular: bool


def index_report(report: RegularityReport) -> IndexReport:
    return IndexReport(
        config=str(report.config),
        index=report.index,
        even_ends=report.even_ends,
        normal_chern=format_fraction(report.normal_chern),
        z=report.z,
        regular=report.regular,
    )


class GradedOut(_Strict):
    iterate: str
    grading: int


class MatchOut(_Strict):
    positive: str
    negative: str
    grading: int


class CobordismReport(_Report):
    positive_end: list[GradedOut]
    negative_end: list[GradedOut]
    matches: list[MatchOut]
    simple_matches: list[MatchOut]
    base_cylinder_index: int
    double_cover_index: int


def cobordism_report(table: CobordismTable) -> CobordismReport:
    return CobordismReport(
        positive_end=[GradedOut(iterate=str(it), grading=it.grading) for it in table.positive_end],
        negative_end=[GradedOut(iterate=str(it), grading=it.grading) for it in table.negative_end],
        matches=[MatchOut(positive=str(m.positive), negative=str(m.negative), grading=m.grading) for m in table.matches],
        simple_matches=[
            MatchOut(positive=str(m.positive), negative=str(m.negative), grading=m.grading)
            for m in table.simple_matches
        ],
        base_cylinder_index=table.base_cylinder_index,
        double_cover_index=table.double_cover_index,
    )


Report = CzReport | ClassifyReport | BuildingsReport | ConditionDReport | HomologyReport | IndexReport | CobordismReport
