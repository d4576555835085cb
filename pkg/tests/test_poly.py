from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from valkey.parsing import ParseError, parse_poly
from valkey.poly import (
    Factor,
    Irreducible,
    Poly,
    UnknownIrreducibility,
    from_expansion,
    hasse_derivative,
    irreducible_bounded,
    poly_divmod,
    q_expansion,
    taylor_expansion,
)

from .conftest import FIELDS, FPT2, FPT3, QP3, QP5, QP7, P, elements, monic_polys_st, polys

X = sympy.Symbol("x")


def _to_sympy(f: Poly):
    return sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(f.coeffs))


def test_divmod_example():
    q, r = poly_divmod(P(QP3, "x^3+2*x+1"), P(QP3, "x-1"))
    assert q == P(QP3, "x^2+x+3") and r == P(QP3, "4")
    with pytest.raises(ZeroDivisionError):
        poly_divmod(P(QP3, "x"), Poly.zero(QP3))


def test_hasse_examples():
    # second Hasse derivative of x^4 is C(4,2) x^2 = 6x^2; 6 = 0 in char 3
    assert hasse_derivative(P(QP3, "x^4"), 2) == P(QP3, "6*x^2")
    assert hasse_derivative(P(FPT3, "x^4"), 2).is_zero()
    assert hasse_derivative(P(FPT3, "x^3"), 3) == P(FPT3, "1")
    assert hasse_derivative(P(FPT3, "x^3"), 1).is_zero()
    with pytest.raises(ValueError):
        hasse_derivative(P(QP3, "x"), -1)


def test_taylor_and_q_expansion_examples():
    f = P(QP7, "x^2-2")
    assert taylor_expansion(f, Fraction(3)) == [7, 6, 1]
    assert q_expansion(P(QP7, "x-10"), P(QP7, "x")) == [P(QP7, "-10"), P(QP7, "1")]
    assert f.eval(Fraction(3)) == 7 and f.eval(Fraction(10)) == 98
    with pytest.raises(ValueError):
        q_expansion(f, P(QP7, "2*x"))


def test_irreducible_examples():
    assert isinstance(irreducible_bounded(P(QP3, "x^2-2")), Irreducible)
    r = irreducible_bounded(P(QP3, "x^2-9"))
    assert isinstance(r, Factor) and r.g.degree == 1
    assert isinstance(irreducible_bounded(P(FPT3, "x^2-t")), Irreducible)
    r = irreducible_bounded(P(FPT2, "x^2+t^2"))  # (x+t)^2 in char 2
    assert isinstance(r, Factor) and r.g == P(FPT2, "x+t")
    with pytest.raises(ValueError):
        irreducible_bounded(P(QP3, "5"))


def test_irreducible_unknown_is_honest():
    # a product of two quadratics whose coefficients lie outside the budget
    f = P(FPT2, "(x^2+t^3*x+t^3+1)*(x^2+t^3*x+t^3+t+1)")
    r = irreducible_bounded(f, budget=1)
    assert isinstance(r, (Factor, UnknownIrreducibility))
    if isinstance(r, Factor):
        assert poly_divmod(f, r.g)[1].is_zero()


@given(monic_polys_st(QP5, 2, 4))
def test_irreducibility_over_q_matches_sympy(f):
    r = irreducible_bounded(f)
    assert isinstance(r, (Irreducible, Factor))
    assert isinstance(r, Irreducible) == sympy.Poly(_to_sympy(f), X).is_irreducible


def test_parse_format_and_errors():
    f = parse_poly(QP3, "x^2 - 1/3*x + 9")
    assert str(f) == "x^2-1/3*x+9"
    assert parse_poly(FPT3, "t*x + 1/t") == P(FPT3, "(t^2*x+1)/t")
    with pytest.raises(ParseError) as info:
        parse_poly(QP3, "x^2 + * 3")
    assert info.value.pos == 6
    with pytest.raises(ParseError):
        parse_poly(QP3, "t*x")


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.descriptor)
@given(data=st.data())
def test_format_parse_roundtrip(F, data):
    f = data.draw(polys(F))
    assert parse_poly(F, str(f)) == f


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.descriptor)
@given(data=st.data())
def test_divmod_property(F, data):
    f = data.draw(polys(F))
    g = data.draw(polys(F, 3, 1))
    q, r = divmod(f, g)
    assert q * g + r == f and r.degree < g.degree


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.descriptor)
@given(data=st.data())
def test_hasse_composition(F, data):
    f = data.draw(polys(F, 6))
    i = data.draw(st.integers(0, 4))
    j = data.draw(st.integers(0, 4))
    lhs = hasse_derivative(hasse_derivative(f, i), j)
    rhs = hasse_derivative(f, i + j).scale(F.from_int(comb(i + j, i)))
    assert lhs == rhs


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.descriptor)
@given(data=st.data())
def test_hasse_leibniz(F, data):
    f = data.draw(polys(F, 3))
    g = data.draw(polys(F, 3))
    b = data.draw(st.integers(0, 4))
    rhs = Poly.zero(F)
    for i in range(b + 1):
        rhs = rhs + hasse_derivative(f, i) * hasse_derivative(g, b - i)
    assert hasse_derivative(f * g, b) == rhs


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.descriptor)
@given(data=st.data())
def test_taylor_reconstructs(F, data):
    f = data.draw(polys(F, 4))
    a = data.draw(elements(F))
    coeffs = taylor_expansion(f, a)
    shifted = Poly(F, coeffs).compose(P(F, "x") - Poly.const(F, a))
    assert shifted == f
    # taylor coefficients agree with the (x - a)-expansion
    parts = q_expansion(f, Poly.linear(F, a)) if f else []
    assert [p.coeff(0) for p in parts] == coeffs


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.descriptor)
@given(data=st.data())
def test_q_expansion_reconstructs(F, data):
    f = data.draw(polys(F, 6))
    q = data.draw(monic_polys_st(F, 1, 3))
    parts = q_expansion(f, q)
    assert from_expansion(parts, q) == f
    assert all(p.degree < q.degree for p in parts)
