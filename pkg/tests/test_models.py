"""Tests for the built-in orbit sets and the cobordism grading table."""

from __future__ import annotations

from fractions import Fraction

import pytest

from cylhom.dynamics import CyclicHomotopy, TrivialHomotopy
from cylhom.models import (
    MODEL_NAMES,
    EllipsoidSpec,
    MorseData,
    cobordism_grading_table,
    ellipsoid_dynsep,
    ellipsoid_thin,
    lens_space,
    model_preset,
    prequantized_s3,
)
from cylhom.orbits import OrbitType, RotationNumber


class TestEllipsoids:
    """Tests for the ellipsoid models."""

    def test_thin_indices(self) -> None:
        orbit_set = ellipsoid_thin()
        gamma1, gamma2 = orbit_set.orbit("gamma1"), orbit_set.orbit("gamma2")
        assert [gamma1.iterate(k).cz for k in range(1, 7)] == [3, 5, 7, 11, 13, 15]
        assert [gamma2.iterate(k).cz for k in (1, 2)] == [9, 17]
        assert (gamma1.action, gamma2.action) == (Fraction(1), Fraction(3))

    def test_thin_default_cap(self) -> None:
        assert ellipsoid_thin().action_cap == Fraction(6)
        assert ellipsoid_thin(Fraction(2)).action_cap == Fraction(2)

    def test_dynsep_indices(self) -> None:
        orbit_set = ellipsoid_dynsep()
        assert [orbit_set.orbit("gamma1").iterate(k).cz for k in (1, 2, 3)] == [3, 7, 11]
        assert [orbit_set.orbit("gamma2").iterate(k).cz for k in (1, 2, 3)] == [5, 9, 13]

    def test_spec_requires_reciprocal(self) -> None:
        with pytest.raises(ValueError, match="must be 1"):
            EllipsoidSpec(RotationNumber(Fraction(1, 2), -1), RotationNumber(Fraction(3), 1))

    def test_spec_requires_opposite_offsets(self) -> None:
        with pytest.raises(ValueError, match="opposite"):
            EllipsoidSpec(RotationNumber(Fraction(1), -1), RotationNumber(Fraction(1), -1))

    def test_spec_collects_errors(self) -> None:
        with pytest.raises(ValueError, match="got 4; offsets must be opposite"):
            EllipsoidSpec(RotationNumber(Fraction(2), 1), RotationNumber(Fraction(2), 1))


class TestPrequantizations:
    """Tests for prequantized S³ and the lens spaces."""

    def test_height_function(self) -> None:
        orbit_set = prequantized_s3(MorseData.height())
        south, north = orbit_set.orbit("gamma_south"), orbit_set.orbit("gamma_north")
        assert [south.iterate(k).cz for k in (1, 2, 3)] == [3, 7, 11]
        assert [north.iterate(k).cz for k in (1, 2, 3)] == [5, 9, 13]
        assert (south.action, north.action) == (Fraction(1), Fraction(51, 50))
        assert isinstance(orbit_set.homotopy, TrivialHomotopy)

    def test_saddle_is_positive_hyperbolic(self) -> None:
        morse = MorseData((("min", 0), ("saddle", 1), ("max1", 2), ("max2", 2)))
        orbit_set = prequantized_s3(morse)
        saddle = orbit_set.orbit("gamma_saddle")
        assert saddle.orbit_type == OrbitType.POSITIVE_HYPERBOLIC
        assert saddle.iterate(1).cz == 4

    def test_morse_euler_characteristic(self) -> None:
        with pytest.raises(ValueError, match="S² needs 2"):
            MorseData((("min", 0),))

    def test_morse_rejects_bad_index(self) -> None:
        with pytest.raises(ValueError, match="Morse indices"):
            MorseData((("min", 0), ("odd", 3)))

    def test_epsilon_range(self) -> None:
        with pytest.raises(ValueError, match=r"\(0, 1/2\)"):
            prequantized_s3(MorseData.height(), Fraction(1, 2))

    def test_lens_space(self) -> None:
        orbit_set = lens_space(2, MorseData.height())
        south = orbit_set.orbit("gamma_south")
        assert [south.iterate(k).cz for k in range(1, 7)] == [1, 1, 3, 5, 5, 7]
        assert south.action == Fraction(1, 3)
        assert isinstance(orbit_set.homotopy, CyclicHomotopy)
        assert orbit_set.homotopy.order == 3

    def test_lens_requires_positive_n(self) -> None:
        with pytest.raises(ValueError, match=">= 1"):
            lens_space(0, MorseData.height())


class TestCobordismTable:
    """Tests for cobordism_grading_table()."""

    def test_ends(self) -> None:
        table = cobordism_grading_table()
        assert [(str(it), it.grading) for it in table.positive_end] == [
            ("delta1", 2),
            ("delta1^2", 4),
            ("delta2", 6),
            ("delta1^3", 8),
        ]
        assert [(str(it), it.grading) for it in table.negative_end] == [
            ("gamma1", 2),
            ("gamma2", 4),
            ("gamma1^2", 6),
            ("gamma2^2", 8),
        ]

    def test_matches(self) -> None:
        table = cobordism_grading_table()
        assert len(table.matches) == 4
        assert [(str(m.positive), str(m.negative)) for m in table.simple_matches] == [
            ("delta1", "gamma1"),
            ("delta2", "gamma1^2"),
        ]

    def test_double_cover_index(self) -> None:
        table = cobordism_grading_table()
        assert table.base_cylinder_index == 0
        assert table.double_cover_index == -2

    def test_smaller_grading_bound(self) -> None:
        table = cobordism_grading_table(4)
        assert len(table.matches) == 2


class TestModelPreset:
    """Tests for model_preset()."""

    @pytest.mark.parametrize("name", MODEL_NAMES)
    def test_every_name_builds(self, name: str) -> None:
        assert model_preset(name).orbits

    def test_cap_override(self) -> None:
        assert model_preset("ellipsoid-thin", action_cap=Fraction(3)).action_cap == Fraction(3)
        assert model_preset("s3").action_cap is None

    def test_lens_parameter(self) -> None:
        assert model_preset("lens", n=4).homotopy.order == 5

    def test_unknown(self) -> None:
        with pytest.raises(ValueError, match="Unknown model 'torus'"):
            model_preset("torus")
