"""Tests for free homotopy models, orbit sets and the convexity/separation classifiers."""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import pytest

from cylhom.dynamics import (
    CONTRACTIBLE,
    CyclicHomotopy,
    OrbitSet,
    TableHomotopy,
    class_of,
    class_sort_key,
    is_dynamically_convex,
    is_dynamically_separated,
    iterate_list,
)
from cylhom.models import MorseData, lens_space, prequantized_s3

from .conftest import make_elliptic


class TestHomotopyModels:
    """Tests for the trivial, cyclic and table models."""

    def test_trivial_rejects_nonzero_seed(self) -> None:
        orbit = make_elliptic("g", Fraction(3, 2))
        bad = replace(orbit, homotopy_seed=1)
        with pytest.raises(ValueError, match="seed 0"):
            OrbitSet((bad,))

    def test_cyclic_classes(self) -> None:
        orbit_set = lens_space(2, MorseData.height())
        south = orbit_set.orbit("gamma_south")
        assert [class_of(orbit_set, south, k) for k in range(1, 7)] == [1, 2, 0, 1, 2, 0]
        assert iterate_list(orbit_set, south, 0, 9) == [3, 6, 9]

    def test_cyclic_order_checked(self) -> None:
        with pytest.raises(ValueError, match="order >= 2"):
            CyclicHomotopy(1)

    def test_cyclic_combines(self) -> None:
        model = CyclicHomotopy(3)
        assert model.combines(0, [1, 2])
        assert not model.combines(1, [1, 1])

    def test_table_lookup(self) -> None:
        orbit = replace(make_elliptic("g", Fraction(3, 2)), homotopy_seed="a")
        model = TableHomotopy(2, (("g", 1, "a"), ("g", 2, 0)))
        orbit_set = OrbitSet((orbit,), model)
        assert class_of(orbit_set, orbit, 1) == "a"
        assert class_of(orbit_set, orbit, 2) == CONTRACTIBLE
        with pytest.raises(ValueError, match="beyond the homotopy table bound"):
            class_of(orbit_set, orbit, 3)

    def test_table_must_be_total(self) -> None:
        orbit = make_elliptic("g", Fraction(3, 2))
        with pytest.raises(ValueError, match="not total"):
            OrbitSet((orbit,), TableHomotopy(2, (("g", 1, 0),)))

    def test_table_rejects_duplicates(self) -> None:
        with pytest.raises(ValueError, match="Duplicate"):
            TableHomotopy(2, (("g", 1, 0), ("g", 1, 0)))

    def test_table_combines_only_contractible(self) -> None:
        model = TableHomotopy(1, ())
        assert model.combines("a", ["a"])
        assert model.combines(0, [0, 0])
        assert not model.combines("a", ["a", 0])

    def test_class_sort_key(self) -> None:
        assert sorted(["b", 2, "a", 0], key=class_sort_key) == [0, 2, "a", "b"]


class TestOrbitSet:
    """Tests for OrbitSet construction and iterate listing."""

    def test_duplicate_names_rejected(self) -> None:
        orbit = make_elliptic("g", Fraction(3, 2))
        with pytest.raises(ValueError, match="duplicate orbit names: g"):
            OrbitSet((orbit, orbit))

    def test_lookup_unknown(self) -> None:
        with pytest.raises(ValueError, match="No orbit named"):
            OrbitSet().orbit("missing")

    def test_iterates_need_a_cap(self) -> None:
        orbit_set = OrbitSet((make_elliptic("g", Fraction(3, 2)),))
        with pytest.raises(ValueError, match="action cap or a k cap"):
            orbit_set.iterates()

    def test_iterates_sorted_by_action(self, thin: OrbitSet) -> None:
        names = [str(it) for it in thin.iterates()]
        assert names == [
            "gamma1",
            "gamma1^2",
            "gamma1^3",
            "gamma2",
            "gamma1^4",
            "gamma1^5",
            "gamma1^6",
            "gamma2^2",
        ]

    def test_k_cap_restricts(self, thin: OrbitSet) -> None:
        assert len(thin.iterates(k_cap=1)) == 2

    def test_empty_set(self) -> None:
        assert OrbitSet(action_cap=Fraction(1)).iterates() == []


class TestConvexity:
    """Tests for is_dynamically_convex()."""

    def test_sphere_is_convex(self) -> None:
        report = is_dynamically_convex(prequantized_s3(MorseData.height()), k_cap=10)
        assert report.passed
        assert report.violations == ()

    def test_index_two_plane_violates(self, planted: OrbitSet) -> None:
        report = is_dynamically_convex(planted, k_cap=5)
        assert not report.passed
        assert [(v.orbit, v.k, v.cz) for v in report.violations] == [("h", 1, 2)]

    def test_noncontractible_iterates_ignored(self) -> None:
        report = is_dynamically_convex(lens_space(3, MorseData.height()), k_cap=12)
        assert report.passed


class TestSeparation:
    """Tests for is_dynamically_separated()."""

    def test_sphere_is_separated(self) -> None:
        report = is_dynamically_separated(prequantized_s3(MorseData.height()), k_cap=10)
        assert report.passed
        assert report.separated_below is None

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_lens_spaces_are_separated(self, n: int) -> None:
        report = is_dynamically_separated(lens_space(n, MorseData.height()), k_cap=4 * (n + 1))
        assert report.passed

    def test_thin_ellipsoid_increment_violation(self, thin: OrbitSet) -> None:
        report = is_dynamically_separated(thin, k_cap=6)
        assert not report.passed
        first = report.violations[0]
        assert first.condition == "increment"
        assert (first.orbit, first.k, first.cz, first.previous_k, first.previous_cz) == ("gamma1", 2, 5, 1, 3)
        assert report.separated_below == Fraction(2)

    def test_contractible_start_window(self, planted: OrbitSet) -> None:
        report = is_dynamically_separated(planted, k_cap=2)
        conditions = {v.condition for v in report.violations}
        assert conditions == {"contractible_start", "increment"}
        assert report.separated_below == Fraction(1)

    def test_action_cap_limits_check(self, thin: OrbitSet) -> None:
        report = is_dynamically_separated(thin, k_cap=6, action_cap=Fraction(1))
        assert report.passed
