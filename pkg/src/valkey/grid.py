"""Coefficient search grids for bounded enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fields import ValuedField
from .poly import Poly

__all__ = ["Grid", "DEFAULT_GRID", "monic_polys"]


@dataclass(frozen=True)
class Grid:
    """The set {c * pi^k : c in multipliers, kmin <= k <= kmax} with pi the uniformizer.

    Over F_p(t) the integer multipliers are reduced mod p, so duplicates vanish.
    """

    multipliers: tuple[int, ...] = (0, 1, -1, 2, -2)
    kmin: int = -2
    kmax: int = 3

    def elements(self, field: ValuedField) -> list:
        pi = field.uniformizer()
        seen: dict = {}
        for c in self.multipliers:
            for k in range(self.kmin, self.kmax + 1):
                e = field.from_int(c) * pi**k
                seen.setdefault(e, None)
        return sorted(seen, key=_grid_order)

    def describe(self) -> dict:
        return {"multipliers": list(self.multipliers), "kmin": self.kmin, "kmax": self.kmax}

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """``c1,c2,...@kmin..kmax``, e.g. ``0,1,-1,2,-2@-2..3``."""
        try:
            cs, ks = text.split("@")
            lo, hi = ks.split("..")
            mults = tuple(int(c) for c in cs.split(",") if c.strip())
            return cls(mults, int(lo), int(hi))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {text!r}; expected e.g. 0,1,-1@-2..3") from exc

    def spec(self) -> str:
        return ",".join(str(c) for c in self.multipliers) + f"@{self.kmin}..{self.kmax}"


def _grid_order(e):
    from .poly import _elem_key

    return _elem_key(e)


DEFAULT_GRID = Grid()


def monic_polys(field: ValuedField, degree: int, elems: list):
    """All monic polynomials of the given degree with lower coefficients in ``elems``."""
    one = field.one()
    for tail in itertools.product(elems, repeat=degree):
        yield Poly(field, tuple(tail) + (one,))

