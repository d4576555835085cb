"""Text grammars for scalars and polynomials, plus canonical printing.

Expressions use ``+ - * / ^`` and parentheses over integer literals, the
variable ``x`` and (over ``fpt:<p>``) the parameter ``t``.  Juxtaposition
(``3x``, ``(t+1)x``) means multiplication.  Division is only allowed by a
nonzero constant.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .fields import PAdicField, RatFunc, TSeriesField, ValuedField
from .poly import Poly

__all__ = ["ParseError", "parse_poly", "parse_scalar", "format_poly", "format_elem"]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}\n  {' ' * (pos + 1)}^")


_TOKEN = re.compile(r"\s*(?:(\d+)|([xt])|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", text, i)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", m.group(1), start))
        elif m.group(2):
            toks.append(("var", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(("op", op, start))
        i = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, field: ValuedField, text: str, allow_x: bool):
        self.F = field
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_x = allow_x

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self) -> Poly:
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek()[:2] == ("op", "+"):
            self.take()
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly:
        acc = self.power()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.power()
                if tok[1] == "*":
                    acc = acc * rhs
                else:
                    if not rhs.is_constant() or rhs.is_zero():
                        self.error("division only by a nonzero constant", tok)
                    acc = acc.scale(self.F.one() / rhs.lc)
            elif tok[0] in ("num", "var") or tok[:2] == ("op", "("):
                acc = acc * self.power()
            else:
                return acc

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.error("exponent must be a non-negative integer", tok)
            base = base ** int(tok[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return Poly.const(self.F, self.F.from_int(int(val)))
        if kind == "var":
            if val == "x":
                if not self.allow_x:
                    self.error("'x' not allowed in a scalar", tok)
                return Poly.x(self.F)
            if not isinstance(self.F, TSeriesField):
                self.error(f"'t' is only available over fpt:<p> fields, not {self.F}", tok)
            return Poly.const(self.F, self.F.t())
        if tok[:2] == ("op", "("):
            inner = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.error("expected ')'", self.toks[self.i - 1])
            return inner
        if tok[:2] == ("op", "-"):
            return -self.power()
        self.i -= 1
        self.error(f"unexpected {val or 'end of input'!r}")


def parse_poly(field: ValuedField, text: str) -> Poly:
    return _Parser(field, text, allow_x=True).parse()


def parse_scalar(field: ValuedField, text: str):
    p = _Parser(field, text, allow_x=False).parse()
    return p.lc if not p.is_zero() else field.zero()


def format_elem(field: ValuedField, c) -> str:
    return field.format_elem(c)


def _coeff_str(field: ValuedField, c) -> str:
    s = field.format_elem(c)
    if isinstance(field, TSeriesField) and c.den == (1,) and sum(1 for a in c.num if a) > 1:
        s = f"({s})"
    return s


def format_poly(f: Poly) -> str:
    """Canonical form: descending powers, explicit signs, no spaces."""
    if f.is_zero():
        return "0"
    F = f.field
    out = []
    for k in range(f.degree, -1, -1):
        c = f.coeffs[k]
        if not c:
            continue
        neg = isinstance(F, PAdicField) and c < 0
        mag = -c if neg else c
        if k == 0:
            body = F.format_elem(mag)
        else:
            mono = "x" if k == 1 else f"x^{k}"
            body = mono if mag == 1 else f"{_coeff_str(F, mag)}*{mono}"
        if out:
            out.append(("-" if neg else "+") + body)
        else:
            out.append(("-" if neg else "") + body)
    return "".join(out)
