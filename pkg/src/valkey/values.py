"""Exact values in Q plus a distinguished infinity.

Valuations in this package take values in ``Fraction | INF``.  ``INF`` compares
above every rational, absorbs addition, and cannot be subtracted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

__all__ = [
    "INF",
    "Infinity",
    "ExtValue",
    "ext_value",
    "ext_compare",
    "ext_add",
    "ext_sub",
    "ext_scale",
    "ext_div",
    "is_inf",
    "format_value",
    "parse_value",
]


class Infinity:
    """The top element of Q + {inf}.  Use the module singleton ``INF``."""

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    __str__ = __repr__

    def __reduce__(self):
        return (Infinity, ())

    def __hash__(self) -> int:
        return hash("valkey.INF")

    def __eq__(self, other: object) -> bool:
        return other is self

    def __ne__(self, other: object) -> bool:
        return other is not self

    def __lt__(self, other: object) -> bool:
        if other is self or isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __le__(self, other: object) -> bool:
        if other is self:
            return True
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if other is self:
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __ge__(self, other: object) -> bool:
        if other is self or isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __add__(self, other: object) -> "Infinity":
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: object) -> "Infinity":
        if isinstance(other, (int, Fraction)):
            return self
        if other is self:
            raise ArithmeticError("INF - INF is undefined")
        return NotImplemented

    def __rsub__(self, other: object):
        raise ArithmeticError("cannot subtract INF")

    def __mul__(self, other: object) -> "Infinity":
        if isinstance(other, int) and other > 0:
            return self
        if isinstance(other, Fraction) and other > 0:
            return self
        raise ArithmeticError(f"INF can only be scaled by a positive number, got {other!r}")

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "Infinity":
        if isinstance(other, int) and other >= 1:
            return self
        raise ArithmeticError(f"INF can only be divided by a positive integer, got {other!r}")

    def __neg__(self):
        raise ArithmeticError("-INF is not a value")


INF = Infinity()

ExtValue = Union[Fraction, Infinity]


def ext_value(v) -> ExtValue:
    """Coerce an int/Fraction/str/INF to an ExtValue."""
    if v is INF:
        return INF
    if isinstance(v, str):
        return parse_value(v)
    return Fraction(v)


def is_inf(v) -> bool:
    return v is INF


def ext_compare(a: ExtValue, b: ExtValue) -> int:
    """Three-way comparison: -1, 0 or 1."""
    if a == b:
        return 0
    return -1 if a < b else 1


def ext_add(a: ExtValue, b: ExtValue) -> ExtValue:
    if a is INF or b is INF:
        return INF
    return Fraction(a) + Fraction(b)


def ext_sub(a: ExtValue, b: ExtValue) -> ExtValue:
    if b is INF:
        raise ArithmeticError("subtracting INF is undefined")
    if a is INF:
        return INF
    return Fraction(a) - Fraction(b)


def ext_scale(a: ExtValue, n: int) -> ExtValue:
    if a is INF:
        if n <= 0:
            raise ArithmeticError("INF can only be scaled by a positive integer")
        return INF
    return Fraction(a) * n


def ext_div(a: ExtValue, n: int) -> ExtValue:
    if not isinstance(n, int) or n < 1:
        raise ArithmeticError(f"divisor must be a positive integer, got {n!r}")
    if a is INF:
        return INF
    return Fraction(a) / n


def format_value(v: ExtValue) -> str:
    if v is INF:
        return "inf"
    return str(Fraction(v))


def parse_value(text: str) -> ExtValue:
    s = text.strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return INF
    return Fraction(s)
