"""Tests for generators, weighted differentials, ∂² checks, homology and gluing counts."""

from __future__ import annotations

import math
import random
from collections.abc import Iterator
from dataclasses import replace
from fractions import Fraction

import pytest
from sympy.polys.domains import QQ

from cylhom.chain import (
    Coefficients,
    DifferentialSquareError,
    GradedMatrixComplex,
    ModuliInput,
    ModuliRecord,
    Variant,
    boundary_count_identity,
    build_generators,
    check_d_squared,
    delta_matrix,
    differential,
    gluing_end_count,
    homology,
    kappa_chain_map_check,
    kappa_matrix,
)
from cylhom.dynamics import CyclicHomotopy, OrbitSet
from cylhom.models import MorseData, lens_space, prequantized_s3
from cylhom.orbits import OrbitType, RotationModel, RotationNumber, SimpleOrbit

from .conftest import make_elliptic, make_explicit


def _two_ladder() -> OrbitSet:
    """Orbits a, b with μ(a^k) = 2k + 1 and μ(b^k) = 2k."""
    return OrbitSet((make_explicit("a", 1, 1), make_explicit("b", 0, Fraction(3, 2))))


def _random_moduli(orbit_set: OrbitSet, rng: random.Random, count: int) -> ModuliInput:
    a, b = orbit_set.orbit("a"), orbit_set.orbit("b")
    records = []
    for _ in range(count):
        k = rng.randint(2, 6)
        if rng.random() < 0.5:
            x, y = a.iterate(k), b.iterate(k)
        else:
            x, y = b.iterate(k), a.iterate(k - 1)
        g = math.gcd(x.k, y.k)
        m = rng.choice([d for d in range(1, g + 1) if g % d == 0])
        records.append(ModuliRecord(x, y, rng.choice([-1, 1]), m))
    return ModuliInput(tuple(records))


def _ladder_records(orbit_set: OrbitSet, *pairs: tuple[str, str, int]) -> ModuliInput:
    return ModuliInput(
        tuple(ModuliRecord(orbit_set.orbit(x).iterate(1), orbit_set.orbit(y).iterate(1), sign) for x, y, sign in pairs)
    )


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


class TestBuildGenerators:
    """Tests for build_generators()."""

    def test_sphere_window(self) -> None:
        table = build_generators(prequantized_s3(MorseData.height()), deg_range=(0, 10))
        assert [(str(g), g.grading) for g in table.generators(0)] == [
            ("gamma_south", 2),
            ("gamma_north", 4),
            ("gamma_south^2", 6),
            ("gamma_north^2", 8),
            ("gamma_south^3", 10),
        ]
        assert len(table) == 5

    def test_bad_iterates_excluded(self) -> None:
        nh = SimpleOrbit("n", OrbitType.NEGATIVE_HYPERBOLIC, RotationModel(RotationNumber(Fraction(3, 2))), Fraction(1))
        table = build_generators(OrbitSet((nh,)), deg_range=(0, 10))
        assert [g.k for g in table.generators(0)] == [1, 3]

    def test_action_cap_applies(self) -> None:
        table = build_generators(prequantized_s3(MorseData.height()), action_cap=Fraction(2), deg_range=(0, 40))
        assert [str(g) for g in table.generators(0)] == ["gamma_south", "gamma_north", "gamma_south^2"]

    def test_lens_classes(self) -> None:
        table = build_generators(lens_space(2, MorseData.height()), deg_range=(0, 4))
        assert table.labels == (0, 1, 2)
        assert [str(g) for g in table.in_degree(1, 0)] == ["gamma_south"]

    def test_empty_range_rejected(self) -> None:
        with pytest.raises(ValueError, match="Empty degree range"):
            build_generators(prequantized_s3(MorseData.height()), deg_range=(3, 1))

    def test_needs_growth_or_cap(self) -> None:
        flat = SimpleOrbit("f", OrbitType.POSITIVE_HYPERBOLIC, RotationModel(RotationNumber(Fraction(0))), Fraction(1))
        with pytest.raises(ValueError, match="action cap is required"):
            build_generators(OrbitSet((flat,)), deg_range=(0, 4))


# ---------------------------------------------------------------------------
# Moduli records and differentials
# ---------------------------------------------------------------------------


class TestModuliRecord:
    def test_index_difference_checked(self, ladder: OrbitSet) -> None:
        x, z = ladder.orbit("x").iterate(1), ladder.orbit("z").iterate(1)
        with pytest.raises(ValueError, match="expected 1"):
            ModuliRecord(x, z, 1)

    def test_multiplicity_divides_gcd(self) -> None:
        orbit_set = _two_ladder()
        a, b = orbit_set.orbit("a"), orbit_set.orbit("b")
        with pytest.raises(ValueError, match="does not divide"):
            ModuliRecord(a.iterate(2), b.iterate(2), 1, 3)
        assert ModuliRecord(a.iterate(2), b.iterate(2), 1, 2).multiplicity == 2

    def test_sign_checked(self, ladder: OrbitSet) -> None:
        with pytest.raises(ValueError, match="Sign"):
            ModuliRecord(ladder.orbit("x").iterate(1), ladder.orbit("y").iterate(1), 0)

    def test_flipped(self, ladder: OrbitSet) -> None:
        moduli = _ladder_records(ladder, ("x", "y", 1))
        assert moduli.flipped().records[0].sign == -1

    def test_classes_must_agree(self) -> None:
        a = make_explicit("a", 1, 1)
        b = make_explicit("b", 0, 1)
        orbit_set = OrbitSet(
            (replace(a, homotopy_seed=1), b),
            CyclicHomotopy(2),
        )
        record = ModuliRecord(orbit_set.orbit("a").iterate(1), orbit_set.orbit("b").iterate(1), 1)
        with pytest.raises(ValueError, match="different free homotopy classes"):
            ModuliInput((record,)).validate(orbit_set)


class TestDifferential:
    """Tests for δ, ∂₋ and ∂₊."""

    def test_weighted_entries(self) -> None:
        orbit_set = _two_ladder()
        a, b = orbit_set.orbit("a"), orbit_set.orbit("b")
        moduli = ModuliInput((ModuliRecord(a.iterate(2), b.iterate(2), 1, 2),))
        table = build_generators(orbit_set, deg_range=(0, 6))
        delta = delta_matrix(table, moduli)
        block = delta.block(0, a.iterate(2).grading)
        assert block is not None
        assert block.entry(b.iterate(2), a.iterate(2)) == Fraction(1, 2)

        minus = differential(table, moduli, Variant.MINUS).block(0, 4)
        plus = differential(table, moduli, Variant.PLUS).block(0, 4)
        assert minus is not None and plus is not None
        assert minus.entry(b.iterate(2), a.iterate(2)) == 1
        assert plus.entry(b.iterate(2), a.iterate(2)) == 1

    def test_variants_differ_without_multiplicity_preservation(self) -> None:
        orbit_set = _two_ladder()
        a, b = orbit_set.orbit("a"), orbit_set.orbit("b")
        moduli = ModuliInput((ModuliRecord(b.iterate(2), a.iterate(1), 1),))
        table = build_generators(orbit_set, deg_range=(0, 6))
        minus = differential(table, moduli, Variant.MINUS).block(0, 3)
        plus = differential(table, moduli, Variant.PLUS).block(0, 3)
        assert minus is not None and plus is not None
        assert minus.entry(a.iterate(1), b.iterate(2)) == 1
        assert plus.entry(a.iterate(1), b.iterate(2)) == 2

    def test_kappa_is_diagonal_multiplicity(self) -> None:
        table = build_generators(_two_ladder(), deg_range=(0, 6))
        kappa = kappa_matrix(table)[0].to_list()
        assert [kappa[i][i] for i in range(len(kappa))] == [QQ(g.k) for g in table.generators(0)]
        assert all(kappa[i][j] == 0 for i in range(len(kappa)) for j in range(len(kappa)) if i != j)

    def test_out_of_window_records_skipped(self) -> None:
        orbit_set = _two_ladder()
        a, b = orbit_set.orbit("a"), orbit_set.orbit("b")
        moduli = ModuliInput((ModuliRecord(a.iterate(5), b.iterate(5), 1),))
        table = build_generators(orbit_set, deg_range=(0, 6))
        assert all(block.is_zero() for block in delta_matrix(table, moduli).blocks)

    def test_missing_generator_rejected(self) -> None:
        orbit_set = _two_ladder()
        capped = OrbitSet(orbit_set.orbits, action_cap=Fraction(2))
        a, b = capped.orbit("a"), capped.orbit("b")
        moduli = ModuliInput((ModuliRecord(a.iterate(2), b.iterate(2), 1),))
        table = build_generators(capped, deg_range=(0, 6))
        with pytest.raises(ValueError, match="not a generator"):
            delta_matrix(table, moduli)

    def test_kappa_chain_map_on_random_moduli(self) -> None:
        orbit_set = _two_ladder()
        table = build_generators(orbit_set, deg_range=(0, 20))
        rng = random.Random(31)
        for _ in range(200):
            moduli = _random_moduli(orbit_set, rng, rng.randint(1, 6))
            assert kappa_chain_map_check(table, moduli)


# ---------------------------------------------------------------------------
# ∂² and homology
# ---------------------------------------------------------------------------


class TestDSquared:
    """Tests for check_d_squared()."""

    def test_witness(self, ladder: OrbitSet) -> None:
        table = build_generators(ladder, deg_range=(0, 6))
        complex_ = differential(table, _ladder_records(ladder, ("x", "y", 1), ("y", "z", 1)))
        result = check_d_squared(complex_)
        assert not result.passed
        witness = result.witness
        assert witness is not None
        assert (str(witness.x), str(witness.z), witness.value) == ("x", "z", Fraction(1))
        assert [str(y) for y in witness.through] == ["y"]

    def test_homology_raises(self, ladder: OrbitSet) -> None:
        table = build_generators(ladder, deg_range=(0, 6))
        complex_ = differential(table, _ladder_records(ladder, ("x", "y", 1), ("y", "z", 1)))
        with pytest.raises(DifferentialSquareError, match="coefficient of z"):
            homology(complex_)

    def test_cancelling_paths(self) -> None:
        orbit_set = OrbitSet(
            (
                make_explicit("x", 3, 3),
                make_explicit("y", 2, 2),
                make_explicit("w", 2, Fraction(5, 2)),
                make_explicit("z", 1, 1),
            )
        )
        moduli = _ladder_records(orbit_set, ("x", "y", 1), ("y", "z", 1), ("x", "w", 1), ("w", "z", -1))
        table = build_generators(orbit_set, deg_range=(0, 6))
        complex_ = differential(table, moduli)
        assert check_d_squared(complex_).passed
        result = homology(complex_)
        assert result.rank(2) == 0
        assert result.rank(3) == 0
        assert result.rank(4) == 1
        assert result.rank(5) == 2


class TestHomology:
    """Acceptance values for the built-in models with zero differential."""

    def test_sphere(self) -> None:
        table = build_generators(prequantized_s3(MorseData.height()), deg_range=(0, 40))
        result = homology(differential(table, ModuliInput()))
        for d, rank, _edge in result.totals():
            expected = 1 if d >= 2 and d % 2 == 0 else 0
            assert rank == expected, d

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_lens_spaces(self, n: int) -> None:
        table = build_generators(lens_space(n, MorseData.height()), deg_range=(0, 40))
        result = homology(differential(table, ModuliInput()))
        assert result.rank(0) == n
        for d in range(1, 41):
            expected = n + 1 if d % 2 == 0 else 0
            assert result.rank(d) == expected, d

    def test_edges_marked(self) -> None:
        table = build_generators(prequantized_s3(MorseData.height()), deg_range=(0, 10))
        result = homology(differential(table, ModuliInput()))
        edges = [d for d, _, edge in result.totals() if edge]
        assert edges == [0, 10]

    def test_subwindow_must_fit(self) -> None:
        table = build_generators(prequantized_s3(MorseData.height()), deg_range=(0, 10))
        with pytest.raises(ValueError, match="not inside"):
            homology(differential(table, ModuliInput()), deg_range=(0, 12))


class TestCoefficients:
    """Doubled cylinder x → y over Q, Z and Z/2."""

    def _complex(self, ladder: OrbitSet) -> GradedMatrixComplex:
        moduli = _ladder_records(ladder, ("x", "y", 1), ("x", "y", 1))
        return differential(build_generators(ladder, deg_range=(0, 6)), moduli)

    def test_rational(self, ladder: OrbitSet) -> None:
        result = homology(self._complex(ladder), coefficients=Coefficients.Q)
        assert result.rank(3) == 0
        assert result.rank(4) == 1

    def test_integer_torsion(self, ladder: OrbitSet) -> None:
        result = homology(self._complex(ladder), coefficients=Coefficients.Z)
        assert result.rank(3) == 0
        group = next(g for g in result.groups if g.degree == 3)
        assert group.torsion == (2,)

    def test_mod_two(self, ladder: OrbitSet) -> None:
        result = homology(self._complex(ladder), coefficients=Coefficients.Z2)
        assert result.rank(3) == 1
        assert result.rank(4) == 2


class TestHomologyInvariance:
    """Ranks do not depend on record order, orbit order or a global sign flip."""

    def _closed_moduli(self, orbit_set: OrbitSet, rng: random.Random) -> Iterator[ModuliInput]:
        table = build_generators(orbit_set, deg_range=(0, 20))
        while True:
            moduli = _random_moduli(orbit_set, rng, rng.randint(1, 4))
            if check_d_squared(differential(table, moduli)).passed:
                yield moduli

    def test_flipped_and_shuffled(self) -> None:
        orbit_set = _two_ladder()
        reordered = OrbitSet(tuple(reversed(orbit_set.orbits)))
        table = build_generators(orbit_set, deg_range=(0, 20))
        reordered_table = build_generators(reordered, deg_range=(0, 20))
        rng = random.Random(43)
        source = self._closed_moduli(orbit_set, rng)
        for _ in range(60):
            moduli = next(source)
            expected = homology(differential(table, moduli)).totals()

            assert homology(differential(table, moduli.flipped())).totals() == expected

            records = list(moduli.records)
            rng.shuffle(records)
            shuffled = ModuliInput(tuple(records))
            assert homology(differential(table, shuffled)).totals() == expected
            assert homology(differential(reordered_table, shuffled)).totals() == expected

    def test_flip_keeps_integer_torsion(self, ladder: OrbitSet) -> None:
        moduli = _ladder_records(ladder, ("x", "y", 1), ("x", "y", 1))
        table = build_generators(ladder, deg_range=(0, 6))
        original = homology(differential(table, moduli), coefficients=Coefficients.Z)
        flipped = homology(differential(table, moduli.flipped()), coefficients=Coefficients.Z)
        assert [g.torsion for g in flipped.groups] == [g.torsion for g in original.groups]


# ---------------------------------------------------------------------------
# Gluing
# ---------------------------------------------------------------------------


class TestGluing:
    """Tests for gluing_end_count() and boundary_count_identity()."""

    def test_end_count(self) -> None:
        assert gluing_end_count(4, 2, 2) == (2, 2)
        assert gluing_end_count(6, 2, 3) == (1, 1)

    def test_end_count_needs_divisors(self) -> None:
        with pytest.raises(ValueError, match="must both divide"):
            gluing_end_count(4, 3, 1)

    def test_good_intermediate(self) -> None:
        orbit_set = _two_ladder()
        a, b = orbit_set.orbit("a"), orbit_set.orbit("b")
        u = ModuliRecord(a.iterate(2), b.iterate(2), 1, 2)
        v = ModuliRecord(b.iterate(2), a.iterate(1), -1)
        table = build_generators(orbit_set, deg_range=(0, 6))
        count = boundary_count_identity(table, ModuliInput((u, v)), a.iterate(2), a.iterate(1))
        assert count.holds
        assert count.boundary_sum == -1
        assert count.contributions[0].value == -1

    def test_bad_intermediate_cancels(self) -> None:
        x = make_elliptic("x", Fraction(7, 2), action=3)
        z = make_elliptic("z", Fraction(5, 2), action=1)
        y = SimpleOrbit("y", OrbitType.NEGATIVE_HYPERBOLIC, RotationModel(RotationNumber(Fraction(3, 2))), Fraction(1))
        orbit_set = OrbitSet((x, y, z), action_cap=Fraction(3))
        u = ModuliRecord(x.iterate(1), y.iterate(2), 1)
        v = ModuliRecord(y.iterate(2), z.iterate(1), 1)
        table = build_generators(orbit_set, deg_range=(0, 10))
        count = boundary_count_identity(table, ModuliInput((u, v)), x.iterate(1), z.iterate(1))
        assert count.contributions[0].bad
        assert count.boundary_sum == 0
        assert count.matrix_entry == 0
        assert count.holds

    def test_index_gap_checked(self, ladder: OrbitSet) -> None:
        table = build_generators(ladder, deg_range=(0, 6))
        with pytest.raises(ValueError, match="= 2"):
            boundary_count_identity(table, ModuliInput(), ladder.orbit("x").iterate(1), ladder.orbit("y").iterate(1))

    def test_random_moduli_satisfy_identity(self) -> None:
        orbit_set = _two_ladder()
        table = build_generators(orbit_set, deg_range=(0, 20))
        pairs = [(x, z) for x in table.generators(0) for z in table.generators(0) if x.cz - z.cz == 2]
        assert pairs
        rng = random.Random(59)
        nonzero = 0
        for _ in range(150):
            moduli = _random_moduli(orbit_set, rng, rng.randint(1, 8))
            for x, z in pairs:
                count = boundary_count_identity(table, moduli, x, z)
                assert count.holds, (x, z, moduli)
                nonzero += count.boundary_sum != 0
        assert nonzero > 0
