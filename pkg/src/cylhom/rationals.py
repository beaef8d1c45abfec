"""Exact rational parsing and formatting shared by documents and the CLI."""

from __future__ import annotations

import re
from fractions import Fraction

_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
_RANGE_RE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")

INFINITY = "inf"


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Parse "p/q" or an integer into a Fraction.

    Floats are rejected.
    """
    if isinstance(text, bool):
        raise ValueError(f"Not a rational: {text!r}")
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    match = _FRACTION_RE.match(text)
    if match is None:
        raise ValueError(f"Not a rational 'p/q': {text!r}")
    denominator = int(match.group(2) or 1)
    if denominator == 0:
        raise ValueError(f"Zero denominator: {text!r}")
    return Fraction(int(match.group(1)), denominator)


def format_fraction(value: Fraction | int) -> str:
    """Render a rational as "p/q", or "p" when integral."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_cap(text: str | int | Fraction | None) -> Fraction | None:
    """Parse an action cap; "inf" and None mean unbounded."""
    if text is None:
        return None
    if isinstance(text, str) and text.strip().lower() in (INFINITY, "∞"):
        return None
    cap = parse_fraction(text)
    if cap <= 0:
        raise ValueError(f"Action cap must be positive, got {format_fraction(cap)}")
    return cap


def format_cap(cap: Fraction | None) -> str:
    return INFINITY if cap is None else format_fraction(cap)


def parse_degree_range(text: str) -> tuple[int, int]:
    """Parse "LO..HI" into an inclusive integer range."""
    match = _RANGE_RE.match(text)
    if match is None:
        raise ValueError(f"Degree range must look like LO..HI, got {text!r}")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo > hi:
        raise ValueError(f"Empty degree range {text!r}")
    return lo, hi
