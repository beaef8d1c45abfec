"""Graded chain complexes of good orbits with the weighted differentials ∂₋ = κδ and ∂₊ = δκ.

Matrices are stored as exact Fractions and handed to sympy's DomainMatrix for
products, ranks and invariant factors.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from cylhom.dynamics import ClassLabel, OrbitSet, class_sort_key
from cylhom.orbits import OrbitIterate, Parity, PeriodicAffineModel, RotationModel, SimpleOrbit

logger = logging.getLogger(__name__)

Matrix = tuple[tuple[Fraction, ...], ...]


class Variant(StrEnum):
    MINUS = "minus"
    PLUS = "plus"


class Coefficients(StrEnum):
    Q = "Q"
    Z = "Z"
    Z2 = "Z2"


# --- Generators ---


@dataclass(frozen=True)
class GeneratorTable:
    """Good iterates per free homotopy class, within an action cap and degree window."""

    orbit_set: OrbitSet
    degrees: tuple[int, int]
    action_cap: Fraction | None
    classes: tuple[tuple[ClassLabel, tuple[OrbitIterate, ...]], ...]

    @property
    def labels(self) -> tuple[ClassLabel, ...]:
        return tuple(label for label, _ in self.classes)

    def generators(self, c: ClassLabel) -> tuple[OrbitIterate, ...]:
        for label, gens in self.classes:
            if label == c:
                return gens
        return ()

    def in_degree(self, c: ClassLabel, d: int) -> tuple[OrbitIterate, ...]:
        return tuple(g for g in self.generators(c) if g.grading == d)

    def __contains__(self, iterate: object) -> bool:
        return any(iterate in gens for _, gens in self.classes)

    def __len__(self) -> int:
        return sum(len(gens) for _, gens in self.classes)


def _degree_k_bound(orbit: SimpleOrbit, hi: int) -> int | None:
    """Largest k whose grading can still be <= hi, or None when unbounded."""
    match orbit.cz:
        case RotationModel(rotation=rotation) if rotation.r > 0:
            return math.floor(Fraction(hi + 2) / (2 * rotation.r))
        case PeriodicAffineModel(period=period, residues=residues, increment=increment) if increment > 0:
            ell_max = math.floor(Fraction(hi + 1 - min(residues), increment))
            return max(period * ell_max + period - 1, 0)
    return None


def build_generators(
    orbit_set: OrbitSet,
    action_cap: Fraction | None = None,
    deg_range: tuple[int, int] = (0, 20),
) -> GeneratorTable:
    """Collect good iterates with grading in deg_range and action <= cap.

    Args:
        orbit_set: Simple orbits and their homotopy model.
        action_cap: Overrides the orbit set's own cap when given.
        deg_range: Inclusive window of gradings μ + n − 3.

    Returns:
        Generators split by free homotopy class, sorted canonically.

    Raises:
        ValueError: If the window is empty or an orbit has no finite iterate bound.
    """
    lo, hi = deg_range
    if lo > hi:
        raise ValueError(f"Empty degree range {lo}..{hi}")
    cap = orbit_set.action_cap if action_cap is None else action_cap
    table_bound = orbit_set.homotopy.k_bound()

    by_class: dict[ClassLabel, list[OrbitIterate]] = defaultdict(list)
    for orbit in orbit_set.orbits:
        limits = [b for b in (_degree_k_bound(orbit, hi), table_bound) if b is not None]
        if cap is not None:
            limits.append(int(cap / orbit.action))
        if not limits:
            raise ValueError(
                f"Orbit {orbit.name}: gradings do not grow with k, an action cap is required"
            )
        for k in range(1, min(limits) + 1):
            iterate = OrbitIterate(orbit, k)
            if iterate.is_bad or not lo <= iterate.grading <= hi:
                continue
            if cap is not None and iterate.action > cap:
                continue
            by_class[orbit_set.class_of(iterate)].append(iterate)

    classes = tuple(
        (label, tuple(sorted(by_class[label], key=OrbitIterate.sort_key)))
        for label in sorted(by_class, key=class_sort_key)
    )
    table = GeneratorTable(orbit_set, (lo, hi), cap, classes)
    logger.debug("Built %d generators in %d classes", len(table), len(classes))
    return table


# --- Moduli input ---


@dataclass(frozen=True)
class ModuliRecord:
    """One rigid cylinder u from x to y with sign ε(u) and multiplicity m(u)."""

    x: OrbitIterate
    y: OrbitIterate
    sign: int
    multiplicity: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (-1, 1):
            raise ValueError(f"Sign must be +1 or -1, got {self.sign}")
        if self.multiplicity < 1:
            raise ValueError(f"Multiplicity must be >= 1, got {self.multiplicity}")
        g = math.gcd(self.x.k, self.y.k)
        if g % self.multiplicity != 0:
            raise ValueError(
                f"Cylinder {self.x} -> {self.y}: multiplicity {self.multiplicity} does not divide gcd {g}"
            )
        if self.x.cz - self.y.cz != 1:
            raise ValueError(
                f"Cylinder {self.x} -> {self.y}: index difference is {self.x.cz - self.y.cz}, expected 1"
            )


@dataclass(frozen=True)
class ModuliInput:
    records: tuple[ModuliRecord, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))

    def validate(self, orbit_set: OrbitSet) -> None:
        errors = [
            f"{r.x} -> {r.y} joins different free homotopy classes"
            for r in self.records
            if orbit_set.class_of(r.x) != orbit_set.class_of(r.y)
        ]
        if errors:
            raise ValueError("Invalid moduli records:\n  " + "\n  ".join(errors))

    @property
    def multiplicity_preserving(self) -> bool:
        return all(r.x.k == r.y.k for r in self.records)

    def flipped(self) -> ModuliInput:
        return ModuliInput(tuple(ModuliRecord(r.x, r.y, -r.sign, r.multiplicity) for r in self.records))


# --- Matrices ---


def _to_domain_matrix(entries: Matrix, shape: tuple[int, int], domain: Coefficients = Coefficients.Q) -> DomainMatrix:
    if domain == Coefficients.Q:
        rows = [[QQ(v.numerator, v.denominator) for v in row] for row in entries]
        return DomainMatrix(rows, shape, QQ)
    integer_rows = [[ZZ(_as_integer(v)) for v in row] for row in entries]
    matrix = DomainMatrix(integer_rows, shape, ZZ)
    return matrix if domain == Coefficients.Z else matrix.convert_to(GF(2))


def _from_domain_matrix(matrix: DomainMatrix) -> Matrix:
    return tuple(
        tuple(Fraction(int(v.numerator), int(v.denominator)) for v in row)
        for row in matrix.to_field().to_list()
    )


def _as_integer(value: Fraction) -> int:
    if value.denominator != 1:
        raise RuntimeError(f"Non-integral differential entry {value}")
    return value.numerator


@dataclass(frozen=True)
class DifferentialBlock:
    """The map from degree d to d − 1 within one class; rows are targets."""

    homotopy_class: ClassLabel
    degree: int
    sources: tuple[OrbitIterate, ...]
    targets: tuple[OrbitIterate, ...]
    entries: Matrix

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.targets), len(self.sources))

    def entry(self, y: OrbitIterate, x: OrbitIterate) -> Fraction:
        return self.entries[self.targets.index(y)][self.sources.index(x)]

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)

    def matrix(self, domain: Coefficients = Coefficients.Q) -> DomainMatrix:
        return _to_domain_matrix(self.entries, self.shape, domain)

    def rank(self, domain: Coefficients = Coefficients.Q) -> int:
        if 0 in self.shape or self.is_zero():
            return 0
        if domain == Coefficients.Z:
            domain = Coefficients.Q
        return int(self.matrix(domain).rank())

    def torsion(self) -> tuple[int, ...]:
        """Invariant factors > 1 of the integer matrix."""
        if 0 in self.shape or self.is_zero():
            return ()
        factors = invariant_factors(self.matrix(Coefficients.Z))
        return tuple(sorted(abs(int(f)) for f in factors if abs(int(f)) > 1))


def _zero(rows: int, cols: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * cols for _ in range(rows)]


def _freeze(rows: list[list[Fraction]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def _matmul(left: Matrix, right: Matrix, shape: tuple[int, int, int]) -> Matrix:
    """left (m×n) · right (n×p) through DomainMatrix."""
    m, n, p = shape
    if 0 in shape:
        return _freeze(_zero(m, p))
    product = _to_domain_matrix(left, (m, n)).matmul(_to_domain_matrix(right, (n, p)))
    return _from_domain_matrix(product)


@dataclass(frozen=True)
class GradedMatrixComplex:
    table: GeneratorTable
    variant: Variant | None
    blocks: tuple[DifferentialBlock, ...]

    def block(self, c: ClassLabel, d: int) -> DifferentialBlock | None:
        for block in self.blocks:
            if block.homotopy_class == c and block.degree == d:
                return block
        return None


def _empty_blocks(table: GeneratorTable) -> dict[tuple[ClassLabel, int], list[list[Fraction]]]:
    lo, hi = table.degrees
    return {
        (c, d): _zero(len(table.in_degree(c, d - 1)), len(table.in_degree(c, d)))
        for c in table.labels
        for d in range(lo + 1, hi + 1)
    }


def _assemble(table: GeneratorTable, raw: dict[tuple[ClassLabel, int], list[list[Fraction]]], variant: Variant | None) -> GradedMatrixComplex:
    blocks = tuple(
        DifferentialBlock(c, d, table.in_degree(c, d), table.in_degree(c, d - 1), _freeze(rows))
        for (c, d), rows in sorted(raw.items(), key=lambda item: (class_sort_key(item[0][0]), item[0][1]))
    )
    return GradedMatrixComplex(table, variant, blocks)


def kappa_matrix(table: GeneratorTable) -> dict[ClassLabel, DomainMatrix]:
    """Diagonal κ: x ↦ m(x)·x per class, in generator order."""
    return {
        c: DomainMatrix.diag([QQ(g.k) for g in gens], QQ)
        for c, gens in table.classes
    }


def delta_matrix(table: GeneratorTable, moduli: ModuliInput) -> GradedMatrixComplex:
    """δ: x ↦ Σ ε(u)/m(u) · y, one block per class and degree."""
    moduli.validate(table.orbit_set)
    lo, hi = table.degrees
    raw = _empty_blocks(table)
    for record in moduli.records:
        if record.x.is_bad or record.y.is_bad:
            logger.debug("Skipping cylinder %s -> %s with a bad end", record.x, record.y)
            continue
        d = record.x.grading
        if not lo < d <= hi:
            logger.debug("Skipping cylinder %s -> %s outside degrees %d..%d", record.x, record.y, lo, hi)
            continue
        for end in (record.x, record.y):
            if end not in table:
                raise ValueError(f"Cylinder end {end} is not a generator; check the action cap")
        c = table.orbit_set.class_of(record.x)
        rows = raw[(c, d)]
        i = table.in_degree(c, d - 1).index(record.y)
        j = table.in_degree(c, d).index(record.x)
        rows[i][j] += Fraction(record.sign, record.multiplicity)
    return _assemble(table, raw, None)


def differential(table: GeneratorTable, moduli: ModuliInput, variant: Variant = Variant.MINUS) -> GradedMatrixComplex:
    """∂₋ = κδ or ∂₊ = δκ, asserted integral."""
    delta = delta_matrix(table, moduli)
    raw: dict[tuple[ClassLabel, int], list[list[Fraction]]] = {}
    for block in delta.blocks:
        rows = [
            [
                value * (y.k if variant == Variant.MINUS else x.k)
                for x, value in zip(block.sources, row)
            ]
            for y, row in zip(block.targets, block.entries)
        ]
        for row in rows:
            for value in row:
                _as_integer(value)
        _check_odd_classes(table, block.homotopy_class, rows)
        raw[(block.homotopy_class, block.degree)] = rows
    complex_ = _assemble(table, raw, variant)

    if moduli.records and moduli.multiplicity_preserving:
        other = Variant.PLUS if variant == Variant.MINUS else Variant.MINUS
        twin = _assemble(table, {
            (b.homotopy_class, b.degree): [
                [v * (y.k if other == Variant.MINUS else x.k) for x, v in zip(b.sources, row)]
                for y, row in zip(b.targets, b.entries)
            ]
            for b in delta.blocks
        }, other)
        if any(a.entries != b.entries for a, b in zip(complex_.blocks, twin.blocks)):
            raise RuntimeError("∂₋ and ∂₊ differ although every cylinder preserves multiplicity")
    return complex_


def _check_odd_classes(table: GeneratorTable, c: ClassLabel, rows: list[list[Fraction]]) -> None:
    if all(g.parity == Parity.ODD for g in table.generators(c)):
        if any(v != 0 for row in rows for v in row):
            raise RuntimeError(f"Nonzero differential in class {c} where every generator has odd index")


# --- ∂² ---


@dataclass(frozen=True)
class DSquaredWitness:
    homotopy_class: ClassLabel
    x: OrbitIterate
    z: OrbitIterate
    value: Fraction
    through: tuple[OrbitIterate, ...]


@dataclass(frozen=True)
class DSquaredResult:
    passed: bool
    witness: DSquaredWitness | None = None


class DifferentialSquareError(ArithmeticError):
    """Raised when a differential does not square to zero."""

    def __init__(self, witness: DSquaredWitness) -> None:
        super().__init__(
            f"∂² ≠ 0: coefficient of {witness.z} in ∂²{witness.x} is {witness.value} "
            f"(through {', '.join(str(y) for y in witness.through) or 'nothing'})"
        )
        self.witness = witness


def check_d_squared(complex_: GradedMatrixComplex) -> DSquaredResult:
    """Verify every consecutive composition vanishes; report the first failure."""
    lo, hi = complex_.table.degrees
    for c in complex_.table.labels:
        for d in range(lo + 2, hi + 1):
            upper, lower = complex_.block(c, d), complex_.block(c, d - 1)
            if upper is None or lower is None:
                continue
            product = _matmul(lower.entries, upper.entries, (len(lower.targets), len(upper.targets), len(upper.sources)))
            for i, z in enumerate(lower.targets):
                for j, x in enumerate(upper.sources):
                    if product[i][j] == 0:
                        continue
                    through = tuple(
                        y
                        for n, y in enumerate(upper.targets)
                        if upper.entries[n][j] != 0 and lower.entries[i][n] != 0
                    )
                    return DSquaredResult(False, DSquaredWitness(c, x, z, product[i][j], through))
    return DSquaredResult(True)


# --- Homology ---


@dataclass(frozen=True)
class HomologyGroup:
    homotopy_class: ClassLabel
    degree: int
    rank: int
    edge: bool
    torsion: tuple[int, ...] = ()


@dataclass(frozen=True)
class HomologyResult:
    coefficients: Coefficients
    variant: Variant | None
    degrees: tuple[int, int]
    groups: tuple[HomologyGroup, ...]
    window: tuple[int, int]

    def rank(self, degree: int, c: ClassLabel | None = None) -> int:
        return sum(g.rank for g in self.groups if g.degree == degree and (c is None or g.homotopy_class == c))

    def totals(self) -> list[tuple[int, int, bool]]:
        lo, hi = self.degrees
        return [(d, self.rank(d), d in self.window) for d in range(lo, hi + 1)]


def homology(
    complex_: GradedMatrixComplex,
    deg_range: tuple[int, int] | None = None,
    coefficients: Coefficients = Coefficients.Q,
) -> HomologyResult:
    """rank H_d = dim C_d − rank ∂_d − rank ∂_(d+1) per class.

    Args:
        complex_: Assembled differential blocks.
        deg_range: Sub-window to report; the whole table when omitted.
        coefficients: Q, Z (ranks plus torsion) or Z/2.

    Returns:
        One HomologyGroup per class and degree. Ranks at the window edges
        are marked; generators outside the window can change them.

    Raises:
        DifferentialSquareError: If ∂² ≠ 0 anywhere in the complex.
        ValueError: If deg_range does not fit inside the table's window.
    """
    check = check_d_squared(complex_)
    if not check.passed:
        assert check.witness is not None
        raise DifferentialSquareError(check.witness)
    table_lo, table_hi = complex_.table.degrees
    lo, hi = deg_range if deg_range is not None else (table_lo, table_hi)
    if lo < table_lo or hi > table_hi or lo > hi:
        raise ValueError(f"Degrees {lo}..{hi} are not inside the generator window {table_lo}..{table_hi}")

    groups: list[HomologyGroup] = []
    for c in complex_.table.labels:
        for d in range(lo, hi + 1):
            dim = len(complex_.table.in_degree(c, d))
            outgoing = complex_.block(c, d)
            incoming = complex_.block(c, d + 1)
            rank_out = outgoing.rank(coefficients) if outgoing is not None else 0
            rank_in = incoming.rank(coefficients) if incoming is not None else 0
            torsion = incoming.torsion() if coefficients == Coefficients.Z and incoming is not None else ()
            groups.append(
                HomologyGroup(c, d, dim - rank_out - rank_in, d in (table_lo, table_hi), torsion)
            )
    logger.info("Computed %s homology on degrees %d..%d", coefficients, lo, hi)
    return HomologyResult(coefficients, complex_.variant, (lo, hi), tuple(groups), (table_lo, table_hi))


# --- Gluing identities ---


def gluing_end_count(m_y: int, m_u: int, m_v: int) -> tuple[int, int]:
    """Ends m(y)/lcm(m(u), m(v)) of the glued family and their multiplicity gcd(m(u), m(v))."""
    if min(m_y, m_u, m_v) < 1:
        raise ValueError(f"Multiplicities must be positive, got {m_y}, {m_u}, {m_v}")
    if m_y % m_u or m_y % m_v:
        raise ValueError(f"m(u) = {m_u} and m(v) = {m_v} must both divide m(y) = {m_y}")
    return m_y // math.lcm(m_u, m_v), math.gcd(m_u, m_v)


@dataclass(frozen=True)
class GluingContribution:
    y: OrbitIterate
    u: ModuliRecord
    v: ModuliRecord
    bad: bool
    value: Fraction


@dataclass(frozen=True)
class BoundaryCount:
    x: OrbitIterate
    z: OrbitIterate
    contributions: tuple[GluingContribution, ...]
    boundary_sum: Fraction
    matrix_entry: Fraction

    @property
    def holds(self) -> bool:
        return self.boundary_sum == self.matrix_entry


def _signed_ends(y: OrbitIterate, u: ModuliRecord, v: ModuliRecord) -> list[Fraction]:
    """The m(y) boundary points of the glued family, each weighted 1/(m(u)m(v))."""
    weight = Fraction(1, u.multiplicity * v.multiplicity)
    ends, end_multiplicity = gluing_end_count(y.k, u.multiplicity, v.multiplicity)
    if Fraction(ends, end_multiplicity) != y.k * weight:
        raise RuntimeError(f"Gluing count mismatch through {y}")
    sign = u.sign * v.sign
    if not y.is_bad:
        return [sign * weight] * y.k
    if y.k % 2:
        raise RuntimeError(f"Bad orbit {y} has odd multiplicity")
    half = y.k // 2
    return [weight] * half + [-weight] * half


def boundary_count_identity(table: GeneratorTable, moduli: ModuliInput, x: OrbitIterate, z: OrbitIterate) -> BoundaryCount:
    """Compare the signed boundary count of glued pairs with ⟨δκδ x, z⟩.

    Args:
        table: Generators; x and z must both be in it.
        moduli: Index-1 cylinder records.
        x: Upper end.
        z: Lower end, with μ(x) − μ(z) = 2 in the same class.

    Returns:
        Per-intermediate contributions and both totals; ``holds`` compares them.
    """
    if x.cz - z.cz != 2:
        raise ValueError(f"Need μ({x}) − μ({z}) = 2, got {x.cz - z.cz}")
    if table.orbit_set.class_of(x) != table.orbit_set.class_of(z):
        raise ValueError(f"{x} and {z} lie in different free homotopy classes")

    contributions: list[GluingContribution] = []
    for u in moduli.records:
        if u.x != x:
            continue
        for v in moduli.records:
            if v.x != u.y or v.y != z:
                continue
            ends = _signed_ends(u.y, u, v)
            value = sum(ends, Fraction(0))
            if u.y.is_bad and value != 0:
                raise RuntimeError(f"Nonzero boundary count through bad orbit {u.y}")
            contributions.append(GluingContribution(u.y, u, v, u.y.is_bad, value))
    boundary_sum = sum((c.value for c in contributions), Fraction(0))
    return BoundaryCount(x, z, tuple(contributions), boundary_sum, _delta_kappa_delta(table, moduli, x, z))


def _delta_kappa_delta(table: GeneratorTable, moduli: ModuliInput, x: OrbitIterate, z: OrbitIterate) -> Fraction:
    for end in (x, z):
        if end not in table:
            raise ValueError(f"{end} is not a generator of the table")
    delta = delta_matrix(table, moduli)
    c = table.orbit_set.class_of(x)
    upper, lower = delta.block(c, x.grading), delta.block(c, x.grading - 1)
    if upper is None or lower is None:
        return Fraction(0)
    j = upper.sources.index(x)
    i = lower.targets.index(z)
    return sum(
        (lower.entries[i][n] * y.k * upper.entries[n][j] for n, y in enumerate(upper.targets)),
        Fraction(0),
    )


def kappa_chain_map_check(table: GeneratorTable, moduli: ModuliInput) -> bool:
    """κ∂₊ = ∂₋κ on every assembled block."""
    plus = differential(table, moduli, Variant.PLUS)
    minus = differential(table, moduli, Variant.MINUS)
    for p, m in zip(plus.blocks, minus.blocks):
        rows, cols = p.shape
        kappa_target = tuple(tuple(Fraction(y.k if a == b else 0) for b in range(rows)) for a, y in enumerate(p.targets))
        kappa_source = tuple(tuple(Fraction(x.k if a == b else 0) for b in range(cols)) for a, x in enumerate(p.sources))
        left = _matmul(kappa_target, p.entries, (rows, rows, cols))
        right = _matmul(m.entries, kappa_source, (rows, cols, cols))
        if left != right:
            logger.warning("κ∂₊ ≠ ∂₋κ in class %s degree %d", p.homotopy_class, p.degree)
            return False
    return True

