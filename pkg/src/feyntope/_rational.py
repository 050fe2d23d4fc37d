"""Exact rational helpers and the string formats used in JSON documents."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, str, Fraction]


def to_fraction(x: RationalLike) -> Fraction:
    """Convert an int, ``"p/q"`` string or Fraction to a Fraction.

    Floats are refused: conversion from binary floating point to an exact
    rational has to be explicit at the call site.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational string")
        return Fraction(s)
    raise TypeError(f"expected int, 'p/q' string or Fraction, got {type(x).__name__}")


def fmt_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_float(x: float) -> str:
    # 17 significant digits round-trip every binary64 value
    return format(float(x), ".16e")


def parse_float(s: str | float) -> float:
    return float(s)


def fraction_vector(xs: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(to_fraction(x) for x in xs)


def fmt_vector(xs: Sequence[Fraction]) -> list[str]:
    return [fmt_fraction(x) for x in xs]


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"length mismatch {len(u)} != {len(v)}")
    return sum(a * b for a, b in zip(u, v))
