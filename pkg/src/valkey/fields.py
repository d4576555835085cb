"""Concrete valued base fields.

Two fields are supported:

* ``PAdicField(p)`` -- Q with the p-adic valuation; elements are ``Fraction``.
* ``TSeriesField(p)`` -- F_p(t) with the t-adic valuation; elements are
  ``RatFunc`` values (numerator / monic denominator, coprime).

Both element types support ``+ - * /`` with each other's kind and with ``int``,
so polynomial code can stay agnostic of the field.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .values import INF, ExtValue

__all__ = [
    "ValuedField",
    "PAdicField",
    "TSeriesField",
    "RatFunc",
    "parse_field",
    "padic_val_int",
    "is_prime",
    "FieldMismatch",
]


class FieldMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def padic_val_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# F_p[t] as tuples of ints in [0, p), lowest degree first, no trailing zeros.

def _trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def fp_add(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def fp_neg(a, p):
    return tuple((-c) % p for c in a)


def fp_sub(a, b, p):
    return fp_add(a, fp_neg(b, p), p)


def fp_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def fp_scale(a, c, p):
    c %= p
    return _trim([(x * c) % p for x in a]) if c else ()


def fp_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial in F_p[t]")
    inv = pow(b[-1], -1, p)
    r = list(a)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1, db - 1, -1):
        c = (r[k] * inv) % p
        if c:
            q[k - db] = c
            for j, y in enumerate(b):
                r[k - db + j] = (r[k - db + j] - c * y) % p
    return _trim(q), _trim(r[:db] if db else [])


def fp_monic(a, p):
    if not a:
        return a, 0
    inv = pow(a[-1], -1, p)
    return fp_scale(a, inv, p), a[-1]


def fp_gcd(a, b, p):
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    return fp_monic(a, p)[0]


def fp_order(a) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("order of zero")


@total_ordering
@dataclass(frozen=True)
class RatFunc:
    """An element of F_p(t) in lowest terms with monic denominator."""

    num: tuple[int, ...]
    den: tuple[int, ...]
    p: int

    @classmethod
    def make(cls, num, den, p: int) -> "RatFunc":
        num = _trim([c % p for c in num])
        den = _trim([c % p for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator in F_p(t)")
        if not num:
            return cls((), (1,), p)
        g = fp_gcd(num, den, p)
        if g != (1,):
            num = fp_divmod(num, g, p)[0]
            den = fp_divmod(den, g, p)[0]
        den, lead = fp_monic(den, p)
        num = fp_scale(num, pow(lead, -1, p), p)
        return cls(num, den, p)

    @classmethod
    def const(cls, n: int, p: int) -> "RatFunc":
        return cls.make((n % p,), (1,), p)

    @classmethod
    def t_power(cls, k: int, p: int) -> "RatFunc":
        if k >= 0:
            return cls.make((0,) * k + (1,), (1,), p)
        return cls.make((1,), (0,) * (-k) + (1,), p)

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.p != self.p:
                raise FieldMismatch(f"F_{self.p}(t) vs F_{other.p}(t)")
            return other
        if isinstance(other, int):
            return RatFunc.const(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.den == o.den:
            return RatFunc.make(fp_add(self.num, o.num, p), self.den, p)
        return RatFunc.make(
            fp_add(fp_mul(self.num, o.den, p), fp_mul(o.num, self.den, p), p),
            fp_mul(self.den, o.den, p),
            p,
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(fp_neg(self.num, self.p), self.den, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        return RatFunc.make(fp_mul(self.num, o.num, p), fp_mul(self.den, o.den, p), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDivisionError("division by zero in F_p(t)")
        p = self.p
        return RatFunc.make(fp_mul(self.num, o.den, p), fp_mul(self.den, o.num, p), p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc.const(1, self.p) / (self ** (-n))
        out = RatFunc.const(1, self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(other, self.p)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.p == other.p and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den, self.p))

    def __lt__(self, other):
        # total order used only for deterministic tie-breaking
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (len(self.num) + len(self.den), self.num, self.den) < (
            len(other.num) + len(other.den),
            other.num,
            other.den,
        )

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RatFunc({_fmt_tpoly(self.num)!r}/{_fmt_tpoly(self.den)!r} mod {self.p})"

    def __str__(self):
        return TSeriesField(self.p).format_elem(self)


def _fmt_tpoly(c: tuple[int, ...]) -> str:
    if not c:
        return "0"
    parts = []
    for k in range(len(c) - 1, -1, -1):
        a = c[k]
        if not a:
            continue
        if k == 0:
            mono = str(a)
        elif k == 1:
            mono = "t" if a == 1 else f"{a}*t"
        else:
            mono = f"t^{k}" if a == 1 else f"{a}*t^{k}"
        parts.append(mono)
    return "+".join(parts)


# ---------------------------------------------------------------------------


class ValuedField:
    """Common interface of the base fields."""

    kind: str
    p: int

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __eq__(self, other):
        return type(self) is type(other) and self.p == other.p

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return f"{type(self).__name__}({self.p})"

    @property
    def descriptor(self) -> str:
        return f"{self.kind}:{self.p}"

    __str__ = lambda self: self.descriptor  # noqa: E731

    @property
    def exponent_characteristic(self) -> int:
        return 1 if self.characteristic == 0 else self.characteristic


class PAdicField(ValuedField):
    """Q with the p-adic valuation."""

    kind = "qp"
    characteristic = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n: int):
        return Fraction(n)

    def coerce(self, a):
        if isinstance(a, (int, Fraction)):
            return Fraction(a)
        raise FieldMismatch(f"{a!r} is not an element of {self.descriptor}")

    def contains(self, a) -> bool:
        return isinstance(a, (int, Fraction))

    def uniformizer(self):
        return Fraction(self.p)

    def val(self, a) -> ExtValue:
        a = Fraction(a)
        if a == 0:
            return INF
        return Fraction(padic_val_int(a.numerator, self.p) - padic_val_int(a.denominator, self.p))

    def format_elem(self, a) -> str:
        return str(Fraction(a))

    def parse_elem(self, text: str):
        from .parsing import parse_scalar

        return parse_scalar(self, text)


class TSeriesField(ValuedField):
    """F_p(t) with the t-adic valuation."""

    kind = "fpt"

    @property
    def characteristic(self) -> int:
        return self.p

    def zero(self):
        return RatFunc((), (1,), self.p)

    def one(self):
        return RatFunc((1,), (1,), self.p)

    def from_int(self, n: int):
        return RatFunc.const(n, self.p)

    def t(self):
        return RatFunc.t_power(1, self.p)

    def uniformizer(self):
        return self.t()

    def coerce(self, a):
        if isinstance(a, int):
            return self.from_int(a)
        if isinstance(a, RatFunc) and a.p == self.p:
            return a
        raise FieldMismatch(f"{a!r} is not an element of {self.descriptor}")

    def contains(self, a) -> bool:
        return isinstance(a, RatFunc) and a.p == self.p

    def val(self, a) -> ExtValue:
        a = self.coerce(a)
        if not a.num:
            return INF
        return Fraction(fp_order(a.num) - fp_order(a.den))

    def format_elem(self, a) -> str:
        a = self.coerce(a)
        num = _fmt_tpoly(a.num)
        if a.den == (1,):
            return num
        den = _fmt_tpoly(a.den)
        if sum(1 for c in a.num if c) > 1:
            num = f"({num})"
        if sum(1 for c in a.den if c) > 1 or "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def parse_elem(self, text: str):
        from .parsing import parse_scalar

        return parse_scalar(self, text)


_FIELD_RE = re.compile(r"^(qp|fpt):(\d+)$")


def parse_field(text: str) -> ValuedField:
    """Parse ``qp:<prime>`` or ``fpt:<prime>``."""
    m = _FIELD_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad field descriptor {text!r}; expected qp:<prime> or fpt:<prime>")
    kind, p = m.group(1), int(m.group(2))
    return PAdicField(p) if kind == "qp" else TSeriesField(p)
