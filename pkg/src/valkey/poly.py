"""Dense univariate polynomials over a valued base field.

Coefficients are stored lowest degree first.  Besides ring arithmetic this
module provides the b-th formal (Hasse) derivative, Taylor expansion at a
point, q-standard expansion and a bounded irreducibility test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .fields import (
    FieldMismatch,
    PAdicField,
    RatFunc,
    TSeriesField,
    ValuedField,
    fp_divmod,
    fp_monic,
)

__all__ = [
    "Poly",
    "NEG_DEGREE",
    "poly_divmod",
    "hasse_derivative",
    "taylor_expansion",
    "q_expansion",
    "from_expansion",
    "Irreducible",
    "Factor",
    "UnknownIrreducibility",
    "irreducible_bounded",
]

NEG_DEGREE = -1  # degree of the zero polynomial


class Poly:
    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: ValuedField, coeffs: Iterable = ()):
        cs = [field.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def x(cls, field: ValuedField) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: ValuedField, c) -> "Poly":
        return cls(field, (c,))

    @classmethod
    def zero(cls, field: ValuedField) -> "Poly":
        return cls(field, ())

    @classmethod
    def linear(cls, field: ValuedField, a) -> "Poly":
        """The monic linear polynomial x - a."""
        return cls(field, (-field.coerce(a), 1))

    @classmethod
    def parse(cls, field: ValuedField, text: str) -> "Poly":
        from .parsing import parse_poly

        return parse_poly(field, text)

    # basic queries ------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def lc(self):
        if not self.coeffs:
            return self.field.zero()
        return self.coeffs[-1]

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero()

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def monic(self) -> "Poly":
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no monic associate")
        inv = self.field.one() / self.coeffs[-1]
        return self.scale(inv)

    def scale(self, c) -> "Poly":
        c = self.field.coerce(c)
        return Poly(self.field, (a * c for a in self.coeffs))

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.field, other)

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(self.field, (self.coeff(i) + o.coeff(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, (-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        if not self.coeffs or not o.coeffs:
            return Poly.zero(self.field)
        out = [self.field.zero()] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __divmod__(self, other):
        return poly_divmod(self, self._lift(other))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, RatFunc)):
            return self.coeffs == Poly.const(self.field, other).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.coeffs))
        return self._hash

    def sort_key(self):
        """Deterministic total order: degree, then coefficients from the top."""
        return (self.degree, tuple(_elem_key(c) for c in reversed(self.coeffs)))

    # evaluation & derivatives ------------------------------------------
    def __call__(self, a):
        return self.eval(a)

    def eval(self, a):
        a = self.field.coerce(a)
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def compose(self, g: "Poly") -> "Poly":
        self._check(g)
        acc = Poly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def hasse(self, b: int) -> "Poly":
        return hasse_derivative(self, b)

    # text ---------------------------------------------------------------
    def __str__(self):
        from .parsing import format_poly

        return format_poly(self)

    def __repr__(self):
        return f"Poly({self.field.descriptor}, {str(self)!r})"


def _elem_key(c):
    if isinstance(c, Fraction):
        # small height first, positive before negative
        return (abs(c.numerator) + c.denominator, c.denominator, c < 0, abs(c.numerator))
    if isinstance(c, RatFunc):
        return (len(c.num) + len(c.den), c.den, c.num)
    return (0,)


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    """Euclidean division: f = q*g + r with deg r < deg g."""
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    F = f.field
    r = list(f.coeffs)
    dg = g.degree
    if len(r) - 1 < dg:
        return Poly.zero(F), f
    inv = F.one() / g.lc
    q = [F.zero()] * (len(r) - dg)
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k] * inv
        if not c:
            continue
        q[k - dg] = c
        for j, b in enumerate(g.coeffs):
            if b:
                r[k - dg + j] = r[k - dg + j] - c * b
    return Poly(F, q), Poly(F, r[:dg])


def hasse_derivative(f: Poly, b: int) -> Poly:
    """The b-th formal derivative: x^n -> C(n, b) x^(n-b).

    Binomials are computed in Z and then mapped into the field, so they vanish
    automatically in characteristic p.
    """
    if b < 0:
        raise ValueError("derivative order must be non-negative")
    if b == 0:
        return f
    F = f.field
    return Poly(F, (F.from_int(comb(n, b)) * f.coeffs[n] for n in range(b, len(f.coeffs))))


def taylor_expansion(f: Poly, a) -> list:
    """Coefficients [d_0 f(a), d_1 f(a), ..., d_n f(a)] of f in powers of (x - a)."""
    if f.is_zero():
        return []
    return [hasse_derivative(f, i).eval(a) for i in range(f.degree + 1)]


def q_expansion(f: Poly, q: Poly) -> list[Poly]:
    """The q-standard expansion [f_0, ..., f_n] with f = sum f_i q^i, deg f_i < deg q."""
    f._check(q)
    if not q.is_monic() or q.degree < 1:
        raise ValueError(f"expansion base must be monic of degree >= 1, got {q}")
    out = []
    rest = f
    while not rest.is_zero():
        rest, r = poly_divmod(rest, q)
        out.append(r)
    if not out:
        out.append(Poly.zero(f.field))
    return out


def from_expansion(parts: Sequence[Poly], q: Poly) -> Poly:
    acc = Poly.zero(q.field)
    for c in reversed(parts):
        acc = acc * q + c
    return acc


# ---------------------------------------------------------------------------
# bounded irreducibility


@dataclass(frozen=True)
class Irreducible:
    pass


@dataclass(frozen=True)
class Factor:
    g: Poly


@dataclass(frozen=True)
class UnknownIrreducibility:
    reason: str


def irreducible_bounded(f: Poly, budget: int = 2):
    """Three-valued irreducibility test.

    Over Q the answer is exact (sympy factorization, verified by division).
    Over F_p(t) a rational-root test is run on divisors of t-degree at most
    ``budget`` and, for degree >= 4, monic factors with budgeted coefficients
    are tried; anything not settled is reported as ``UnknownIrreducibility``.
    A returned ``Factor`` is always an exact proper divisor.
    """
    if f.degree < 1:
        raise ValueError("irreducibility of a constant is not defined")
    if f.degree == 1:
        return Irreducible()
    if isinstance(f.field, PAdicField):
        return _irreducible_q(f)
    return _irreducible_fpt(f, budget)


def _verified(f: Poly, g: Poly):
    g = g.monic()
    q, r = poly_divmod(f, g)
    if not r.is_zero() or not (1 <= g.degree < f.degree):
        raise AssertionError(f"factor {g} does not properly divide {f}")
    return Factor(g)


def _irreducible_q(f: Poly):
    import sympy

    X = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(f.coeffs))
    _, factors = sympy.factor_list(expr, X)
    nontrivial = [(fac, m) for fac, m in factors if sympy.degree(fac, X) >= 1]
    if len(nontrivial) == 1 and nontrivial[0][1] == 1:
        return Irreducible()
    fac = min((fac for fac, _ in nontrivial), key=lambda e: sympy.degree(e, X))
    coeffs = sympy.Poly(fac, X).all_coeffs()[::-1]
    g = Poly(f.field, (Fraction(int(c.p), int(c.q)) for c in coeffs))
    return _verified(f, g)


def _tpolys(p: int, max_deg: int, monic: bool):
    for d in range(max_deg + 1):
        if monic:
            for tail in itertools.product(range(p), repeat=d):
                yield tuple(tail) + (1,)
        else:
            for lead in range(1, p):
                for tail in itertools.product(range(p), repeat=d):
                    yield tuple(tail) + (lead,)


def _tdivisors(a: tuple[int, ...], p: int, budget: int):
    """Monic divisors of a in F_p[t] of degree <= budget; flag whether complete."""
    da = len(a) - 1
    cap = min(da, budget)
    out = []
    for d in _tpolys(p, cap, monic=True):
        if not fp_divmod(a, d, p)[1]:
            out.append(d)
    return out, cap == da


def _irreducible_fpt(f: Poly, budget: int):
    F: TSeriesField = f.field  # type: ignore[assignment]
    p = F.p
    # clear denominators: work in F_p[t][x]
    from .fields import fp_mul, fp_gcd

    den = (1,)
    for c in f.coeffs:
        if c:
            den = fp_mul(den, fp_divmod(c.den, fp_gcd(den, c.den, p), p)[0], p)
    ints = [fp_divmod(fp_mul(c.num, den, p), c.den, p)[0] if c else () for c in f.coeffs]
    a0, an = ints[0], ints[-1]
    if not a0:
        return _verified(f, Poly.x(F))
    num_divs, num_complete = _tdivisors(a0, p, budget)
    den_divs, den_complete = _tdivisors(an, p, budget)
    for u in num_divs:
        for v in den_divs:
            for unit in range(1, p):
                r = RatFunc.make(tuple(unit * c for c in u), v, p)
                if not f.eval(r):
                    return _verified(f, Poly.linear(F, r))
    roots_exhaustive = num_complete and den_complete
    if f.degree <= 3 and roots_exhaustive:
        return Irreducible()
    # trial division by monic factors of degree 2 .. deg/2 with budgeted coefficients
    elems = _budget_elems(p, budget)
    for d in range(2, f.degree // 2 + 1):
        for tail in itertools.product(elems, repeat=d):
            g = Poly(F, tuple(tail) + (F.one(),))
            if poly_divmod(f, g)[1].is_zero():
                return _verified(f, g)
    return UnknownIrreducibility(
        f"no factor found with t-degree budget {budget}"
        + ("" if roots_exhaustive else "; rational-root test incomplete")
    )


def _budget_elems(p: int, budget: int) -> list[RatFunc]:
    seen = {}
    for num in itertools.chain([()], _tpolys(p, budget, monic=False)):
        for den in _tpolys(p, budget, monic=True):
            r = RatFunc.make(num, den, p)
            seen.setdefault(r, None)
    return sorted(seen)
