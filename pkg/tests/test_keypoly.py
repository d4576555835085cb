from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from valkey.keypoly import (
    Certified,
    Falsified,
    alpha_psi,
    build_complete_set,
    classify_limit,
    epsilon,
    eps_value,
    is_key,
    support_set,
    truncate,
)
from valkey.poly import Poly
from valkey.suites import COMPLETE_SET_CASES, complete_set_corpus
from valkey.values import INF
from valkey.xval import chain_describe, parse_valuation

from .conftest import QP3, QP7, P, monic_polys_st, polys

ROOT = "root:qp:7;g=x^2-2;a0=3"
AUG = "aug:(gauss:qp:3:1);Q=x-3;g=2"

X = sympy.Symbol("x")


def _epsilon_oracle(V, f: Poly):
    """max_b (v(f) - v(f^(b)/b!)) / b with derivatives taken by sympy (characteristic 0 only)."""
    F = f.field
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(f.coeffs))
    vf = V(f)
    best = None
    for b in range(1, f.degree + 1):
        d = sympy.Poly(sympy.diff(expr, X, b) / sympy.factorial(b), X)
        if d.is_zero:
            continue
        g = Poly(F, [Fraction(int(c.p), int(c.q)) for c in reversed(d.all_coeffs())])
        r = (vf - V(g)) / b
        best = r if best is None or r > best else best
    return best


def _lin(a: int) -> str:
    return f"x-{a}" if a >= 0 else f"x+{-a}"


# -- epsilon ---------------------------------------------------------------


def test_epsilon_examples():
    V = parse_valuation("gauss:qp:3:1")
    rep = epsilon(V, P(QP3, "x^2+1"))
    assert rep.epsilon == 0 and rep.I == [2] and rep.b == 2
    assert epsilon(V, P(QP3, "x")).epsilon == 1
    R = parse_valuation(ROOT)
    rep = epsilon(R, P(QP7, "x^2-2"))
    assert rep.epsilon is INF and rep.I == [1] and rep.value is INF
    assert eps_value(R, P(QP7, "x-10")) == 2
    with pytest.raises(ValueError):
        epsilon(V, P(QP3, "7"))


def test_epsilon_in_positive_characteristic():
    # x^3 - t over F_3(t): only the third Hasse derivative survives
    V = parse_valuation("gauss:fpt:3:1/3")
    rep = epsilon(V, P(V.field, "x^3-t"))
    assert rep.I == [3] and rep.epsilon == Fraction(1, 3)


@pytest.mark.parametrize("desc", ["gauss:qp:3:1", AUG, "aug:(gauss:qp:3:0);Q=x^2+1;g=1", "gauss:qp:5:1/2"])
@given(data=st.data())
def test_epsilon_matches_sympy_derivatives(desc, data):
    V = parse_valuation(desc)
    f = data.draw(polys(V.field, 4, 1))
    assert epsilon(V, f).epsilon == _epsilon_oracle(V, f)


# -- truncation --------------------------------------------------------------


def test_truncation_examples():
    A = parse_valuation(AUG)
    f = P(QP3, "x^2-9")
    assert truncate(A, P(QP3, "x-3"), f) == 3
    assert truncate(A, P(QP3, "x"), f) == 2 and A(f) == 3
    assert support_set(A, P(QP3, "x"), f) == ([0, 2], 2)
    assert support_set(A, P(QP3, "x-3"), f) == ([1], 1)  # (x-3)^2 + 6(x-3)
    with pytest.raises(ValueError):
        truncate(A, P(QP3, "3*x"), f)


@pytest.mark.parametrize("desc", ["gauss:qp:3:1", AUG, "aug:(gauss:fpt:3:1/2);Q=x^2-t;g=3/2"])
@given(data=st.data())
def test_truncation_never_exceeds_value(desc, data):
    V = parse_valuation(desc)
    f = data.draw(polys(V.field, 4))
    q = data.draw(monic_polys_st(V.field, 1, 2))
    if f:
        assert truncate(V, q, f) <= V(f)
        S, delta = support_set(V, q, f)
        assert delta == max(S) and S


@pytest.mark.parametrize("desc", ["gauss:qp:3:1", "gauss:fpt:3:1"])
@given(data=st.data())
def test_gauss_is_its_x_truncation(desc, data):
    V = parse_valuation(desc)
    f = data.draw(polys(V.field, 4).filter(bool))
    assert truncate(V, Poly.x(V.field), f) == V(f)


# -- key status ---------------------------------------------------------------


def test_is_key_examples():
    G = parse_valuation("gauss:qp:3:1")
    assert is_key(G, P(QP3, "x")) == Certified("Linear", exact=True)
    st_ = is_key(G, P(QP3, "x^2+1"))
    assert isinstance(st_, Falsified) and st_.witness == P(QP3, "x")
    R = parse_valuation(ROOT)
    st_ = is_key(R, P(QP7, "x^2-2"))
    assert isinstance(st_, Certified) and st_.reason == "LimitWitness" and not st_.exact
    assert "bounded-scale evidence" in st_.summary()
    A = parse_valuation("aug:(gauss:qp:3:0);Q=x^2+1;g=1")
    st_ = is_key(A, P(QP3, "x^2+1"))
    assert isinstance(st_, Certified)
    with pytest.raises(ValueError):
        is_key(G, P(QP3, "2*x^2"))


def test_key_in_positive_characteristic_with_large_I():
    V = parse_valuation("aug:(gauss:fpt:3:1/3);Q=x^3+2*t;g=2")
    Q = P(V.field, "x^3-t")
    assert isinstance(is_key(V, Q), Certified)
    assert epsilon(V, Q).I == [3]


def test_mixed_characteristic_key_with_I_not_a_power_of_p():
    """Over Q_3 the exponent characteristic is 1, so "I(Q) consists of powers of
    the exponent characteristic" would force I(Q) = {1}.  The key x^3 - 3 of
    [v_gauss(x) = 1/3; v(x^3 - 3) = 2] has I = {3}: the law only holds with the
    residue characteristic in place of the exponent characteristic here."""
    V = parse_valuation("aug:(gauss:qp:3:1/3);Q=x^3-3;g=2")
    Q = P(QP3, "x^3-3")
    assert isinstance(is_key(V, Q), Certified)
    rep = epsilon(V, Q)
    assert rep.I == [3]
    assert QP3.exponent_characteristic == 1


@pytest.mark.parametrize(
    "desc,text",
    [("gauss:qp:3:1", "x^2+1"), ("gauss:qp:3:1", "x^2+3*x+9"), (AUG, "x^2-9"), ("gauss:fpt:3:1", "x^2+t")],
)
def test_falsified_witness_reverifies(desc, text):
    V = parse_valuation(desc)
    Q = P(V.field, text)
    st_ = is_key(V, Q)
    assert isinstance(st_, Falsified)
    assert st_.witness.degree < Q.degree
    assert eps_value(V, st_.witness) == st_.eps_witness >= st_.eps_Q == eps_value(V, Q)


@pytest.mark.parametrize("desc", ["gauss:qp:3:1", AUG, "aug:(gauss:qp:3:0);Q=x^2+1;g=1"])
@given(data=st.data())
def test_certified_keys_beat_lower_degrees(desc, data):
    """Definition check: every monic g of smaller degree has eps(g) < eps(Q)."""
    V = parse_valuation(desc)
    keys = [Q for Q, _ in chain_describe(V)]
    Q = keys[-1]
    assert isinstance(is_key(V, Q), Certified)
    if Q.degree > 1:
        g = data.draw(monic_polys_st(V.field, 1, Q.degree - 1))
        assert eps_value(V, g) < eps_value(V, Q)


@given(st.integers(-400, 400))
def test_linear_keys_are_always_certified(a):
    R = parse_valuation(ROOT)
    assert is_key(R, P(QP7, _lin(a))).exact


# -- alpha and Psi ---------------------------------------------------------------


def test_alpha_psi_examples():
    A = parse_valuation(AUG)
    assert alpha_psi(A, P(QP3, "x-3"), 2).alpha is None
    rep = alpha_psi(A, P(QP3, "x"), 2)
    assert rep.alpha == 1 and rep.psi_samples[0] == P(QP3, "x-3")
    R = parse_valuation(ROOT)
    rep = alpha_psi(R, P(QP7, "x-3"), 2)
    assert rep.alpha == 1 and P(QP7, "x-10") in rep.psi_samples
    assert all(truncate(R, P(QP7, "x-3"), f) < R(f) for f in rep.psi_samples)
    G = parse_valuation("gauss:qp:3:0")
    rep = alpha_psi(parse_valuation("aug:(gauss:qp:3:0);Q=x^2+1;g=1"), P(QP3, "x"), 2)
    assert rep.alpha == 2 and rep.psi_samples[0] == P(QP3, "x^2+1")
    assert alpha_psi(G, P(QP3, "x"), 2).alpha is None


# -- limit key polynomials -------------------------------------------------------


def test_classify_limit_root():
    R = parse_valuation(ROOT)
    rep = classify_limit(R, P(QP7, "x^2-2"), R.gen)
    assert rep.overall and rep.k1 and rep.k2 and rep.k3 and rep.k4
    assert rep.q_minus.degree == 1
    d = rep.to_dict()
    assert d["K2_evidence"] == "bounded-scale evidence"
    # the limit values of x - a_rho strictly increase without a maximum in the window
    assert all(a < b for a, b in zip(rep.psi_values, rep.psi_values[1:]))


def test_classify_limit_rejects_linear():
    R = parse_valuation(ROOT)
    rep = classify_limit(R, P(QP7, "x-3"), R.gen)
    assert not rep.overall


# -- complete sets -------------------------------------------------------------------


def test_complete_set_root():
    R = parse_valuation(ROOT)
    corpus = complete_set_corpus(R, 2, "0,1,-1,7,-7@0..0")
    res = build_complete_set(R, 2, corpus)
    assert res.complete and res.verify(R)
    assert res.lambda_[0] == P(QP7, "x-3")
    assert res.lambda_[-1] == P(QP7, "x^2-2") and res.keys[-1].limit
    assert all(k.cofinal for k in res.keys[:-1])


def test_complete_set_gauss_and_augmented():
    G = parse_valuation("gauss:qp:3:1")
    res = build_complete_set(G, 2, complete_set_corpus(G, 2, "0,1,-1,3,-3@0..0"))
    assert res.lambda_ == [P(QP3, "x")] and res.complete
    A = parse_valuation(AUG)
    res = build_complete_set(A, 2, complete_set_corpus(A, 2, "0,1,-1,3,-3@0..0"))
    assert res.lambda_ == [P(QP3, "x-3")] and res.complete
    B = parse_valuation("aug:(gauss:qp:3:0);Q=x^2+1;g=1")
    res = build_complete_set(B, 2, complete_set_corpus(B, 2, "0,1,-1,3,-3@0..0"))
    assert res.lambda_ == [P(QP3, "x"), P(QP3, "x^2+1")] and res.complete


@pytest.mark.parametrize("desc,bound,gspec", COMPLETE_SET_CASES)
def test_complete_set_witnesses_by_brute_force(desc, bound, gspec):
    V = parse_valuation(desc)
    corpus = complete_set_corpus(V, bound, gspec)
    res = build_complete_set(V, bound, corpus)
    assert res.complete
    eps = [k.epsilon for k in res.keys]
    assert eps == sorted(eps) and len(set(eps)) == len(eps)
    for f in corpus:
        # independent re-check: some key truncates f to its value
        assert any(truncate(V, Q, f) == V(f) for Q in res.lambda_)


def test_reducible_square_is_falsified():
    G = parse_valuation("gauss:qp:3:1")
    st_ = is_key(G, P(QP3, "x^2"))
    assert isinstance(st_, Falsified) and st_.witness == P(QP3, "x")
    assert epsilon(G, P(QP3, "x^2")).I == [1, 2]


def test_linear_level_equals_value():
    G = parse_valuation("gauss:qp:3:1")
    rep = epsilon(G, P(QP3, "x-3"))
    assert (rep.epsilon, rep.I, rep.b) == (1, [1], 1)
