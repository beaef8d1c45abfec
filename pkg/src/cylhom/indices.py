"""Fredholm indices, Riemann-Hurwitz bookkeeping and automatic transversality.

Everything here is dimension three (n = 2) and genus zero unless a function
takes a genus explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Sequence

from cylhom.orbits import OrbitIterate, OrbitType, Parity, RotationModel, SimpleOrbit, cz_index


class BaseKind(StrEnum):
    GENERAL = "general"
    NONTRIVIAL_CYLINDER = "nontrivial_cylinder"
    TRIVIAL_CYLINDER = "trivial_cylinder"


@dataclass(frozen=True)
class PunctureConfig:
    """One positive end and an ordered list of negative ends, genus 0."""

    positive: OrbitIterate
    negatives: tuple[OrbitIterate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "negatives", tuple(self.negatives))

    @property
    def is_plane(self) -> bool:
        return not self.negatives

    @property
    def is_cylinder(self) -> bool:
        return len(self.negatives) == 1

    def __str__(self) -> str:
        negatives = ", ".join(str(n) for n in self.negatives)
        return f"({self.positive}; {negatives})"


@dataclass(frozen=True)
class CoverData:
    """A degree-k branched cover of a base curve with b interior branch points."""

    k: int
    b: int
    base: PunctureConfig
    base_kind: BaseKind

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"Cover degree must be >= 1, got {self.k}")
        if self.b < 0:
            raise ValueError(f"Branch count must be >= 0, got {self.b}")
        if self.base_kind == BaseKind.TRIVIAL_CYLINDER and (
            not self.base.is_cylinder or self.base.negatives[0] != self.base.positive
        ):
            raise ValueError(f"Trivial cylinder base must have equal ends, got {self.base}")
        if self.base_kind == BaseKind.NONTRIVIAL_CYLINDER and not self.base.is_cylinder:
            raise ValueError(f"Cylinder base must have exactly one negative end, got {self.base}")

    @property
    def negative_ends(self) -> int:
        """Negative ends of the cover over a cylinder base: one per preimage."""
        return 1 + self.b


# --- Index formulas ---


def fredholm_index(config: PunctureConfig) -> int:
    """−(1 − s) + μ(γ₊) − Σ μ(γ₋ᵢ) for s negative ends."""
    s = len(config.negatives)
    return -(1 - s) + config.positive.cz - sum(n.cz for n in config.negatives)


def riemann_hurwitz_euler(k: int, chi_base: int, b_total: int) -> int:
    """Euler characteristic k·χ − b of a k-fold cover with total ramification b."""
    if k < 1:
        raise ValueError(f"Cover degree must be >= 1, got {k}")
    if b_total < 0:
        raise ValueError(f"Total ramification must be >= 0, got {b_total}")
    return k * chi_base - b_total


def cover_negative_punctures(k: int, s: int, b: int) -> int:
    """Negative punctures 1 + k·s + b of a genus-0 cover.

    The base has s + 1 negative ends; b counts interior branch points.
    """
    if k < 1 or s < 0 or b < 0:
        raise ValueError(f"Need k >= 1, s >= 0, b >= 0, got k={k}, s={s}, b={b}")
    return 1 + k * s + b


@dataclass(frozen=True)
class RamificationSplit:
    positive: int
    negative: int
    interior: int

    @property
    def total(self) -> int:
        return self.positive + self.negative + self.interior


def ramification_split(k: int, s: int, b: int) -> RamificationSplit:
    """Distribute the 2k − 2 ramification of a genus-0 cover over its punctures.

    The single positive puncture is fully ramified (k − 1), b sits away from
    the punctures and the rest, k − 1 − b, over the s + 1 negative orbits.
    """
    if k < 1 or s < 0 or b < 0:
        raise ValueError(f"Need k >= 1, s >= 0, b >= 0, got k={k}, s={s}, b={b}")
    negative = k - 1 - b
    if negative < 0:
        raise ValueError(f"Branch count {b} exceeds k − 1 = {k - 1}")
    # Each of the s + 1 negative orbits has k preimages when unramified.
    if negative > (s + 1) * (k - 1):
        raise ValueError(f"Negative ramification {negative} exceeds {(s + 1) * (k - 1)}")
    split = RamificationSplit(k - 1, negative, b)
    if riemann_hurwitz_euler(k, 2, split.total) != 2:
        raise RuntimeError(f"Riemann-Hurwitz does not close for k={k}, s={s}, b={b}")
    # Punctured base sphere has s + 2 punctures; only interior branching enters.
    cover_negatives = k * (s + 1) - negative
    if riemann_hurwitz_euler(k, -s, b) != 2 - (1 + cover_negatives):
        raise RuntimeError(f"Punctured Riemann-Hurwitz does not close for k={k}, s={s}, b={b}")
    if cover_negatives != cover_negative_punctures(k, s, b):
        raise RuntimeError(f"Puncture count mismatch for k={k}, s={s}, b={b}")
    return split


def _end_is_hyperbolic(iterate: OrbitIterate) -> bool:
    orbit = iterate.orbit
    if orbit.orbit_type == OrbitType.EXPLICIT:
        return iterate.parity == Parity.EVEN
    return orbit.is_hyperbolic


def cover_index_lower_bound(cover: CoverData) -> int:
    """Index lower bound for a genus-0 branched cover."""
    match cover.base_kind:
        case BaseKind.GENERAL:
            return 2 - cover.k + 2 * cover.b
        case BaseKind.TRIVIAL_CYLINDER:
            return 0
        case BaseKind.NONTRIVIAL_CYLINDER:
            d = fredholm_index(cover.base)
            n = cover.negative_ends
            if d <= 0:
                raise ValueError(f"Nontrivial cylinder {cover.base} has index {d} <= 0")
            if d >= 2:
                return 2 * n
            bounds: list[int] = []
            if _end_is_hyperbolic(cover.base.positive):
                bounds.append(2 * n - 1)
            if _end_is_hyperbolic(cover.base.negatives[0]):
                bounds.append(n)
            if not bounds:
                raise ValueError(f"Index-1 cylinder {cover.base} has no hyperbolic end")
            return max(bounds)
    raise ValueError(f"Unknown base kind {cover.base_kind!r}")


def trivial_cover_index(orbit: SimpleOrbit, partition: Sequence[int]) -> int:
    """(n − 1) + μ(γ^k) − Σ μ(γ^kᵢ) for a branched cover of the trivial cylinder over γ^k.

    Asserted nonnegative (and equal to n − 1 for hyperbolic orbits) when the
    orbit carries a rotation number.
    """
    if not partition or any(part < 1 for part in partition):
        raise ValueError(f"Partition must be a nonempty list of positive integers, got {list(partition)}")
    n = len(partition)
    k = sum(partition)
    index = (n - 1) + cz_index(orbit, k) - sum(cz_index(orbit, part) for part in partition)
    if isinstance(orbit.cz, RotationModel):
        if index < 0:
            raise RuntimeError(f"Trivial cylinder cover over {orbit.name} with parts {list(partition)} has index {index}")
        if orbit.is_hyperbolic and index != n - 1:
            raise RuntimeError(
                f"Hyperbolic trivial cylinder cover over {orbit.name} has index {index}, expected {n - 1}"
            )
    return index


# --- Automatic transversality ---


def even_ends(config: PunctureConfig) -> int:
    """Number of ends with even Conley-Zehnder index (#Γ₀)."""
    ends = (config.positive, *config.negatives)
    return sum(1 for end in ends if end.parity == Parity.EVEN)


def normal_chern(ind: int, n_gamma0: int) -> Fraction:
    """Normal first Chern number (ind − 2 + #Γ₀) / 2."""
    if n_gamma0 < 0:
        raise ValueError(f"#Γ₀ must be >= 0, got {n_gamma0}")
    return Fraction(ind - 2 + n_gamma0, 2)


def k_function(r: Fraction | int, g: int) -> int:
    """min{k + ℓ : 0 <= k <= G, ℓ even >= 0, 2k + ℓ > 2r}."""
    r = Fraction(r)
    if (2 * r).denominator != 1:
        raise ValueError(f"r must be a half-integer, got {r}")
    if g < 0:
        raise ValueError(f"G must be >= 0, got {g}")
    best: int | None = None
    for k in range(g + 1):
        t = int(2 * r) - 2 * k
        if t < 0:
            ell = 0
        else:
            ell = t + 2 if t % 2 == 0 else t + 1
        if best is None or k + ell < best:
            best = k + ell
    assert best is not None
    return best


def automatic_transversality(ind: int, genus: int, n_gamma0: int, z: int) -> bool:
    """ind > 2g + #Γ₀ − 2 + 2Z."""
    if genus < 0 or n_gamma0 < 0 or z < 0:
        raise ValueError(f"Need genus, #Γ₀ and Z >= 0, got {genus}, {n_gamma0}, {z}")
    return ind > 2 * genus + n_gamma0 - 2 + 2 * z


@dataclass(frozen=True)
class RegularityReport:
    config: PunctureConfig
    index: int
    even_ends: int
    normal_chern: Fraction
    z: int
    regular: bool


def regularity_report(config: PunctureConfig, z: int = 0) -> RegularityReport:
    """Index data and the automatic transversality verdict for a genus-0 curve."""
    ind = fredholm_index(config)
    n0 = even_ends(config)
    return RegularityReport(
        config=config,
        index=ind,
        even_ends=n0,
        normal_chern=normal_chern(ind, n0),
        z=z,
        regular=automatic_transversality(ind, 0, n0, z),
    )
