from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.ntheory import sqrt_mod

from valkey.errors import DegenerateConstant, Indeterminate, NonSimpleRoot
from valkey.grid import Grid
from valkey.pcs import (
    PcsPrefix,
    check_pcs,
    classify_type,
    dominant_index,
    fixed_value,
    is_power_of,
    parse_generator,
)
from valkey.values import INF

from .conftest import FPT3, QP3, QP5, QP7, P

HENSEL = "hensel:qp:7;g=x^2-2;a0=3"
HENSEL_LADDER = [3, 10, 108, 2166, 4567, 38181, 155830, 1802916, 24862120]


def test_check_pcs_examples():
    assert check_pcs(PcsPrefix(QP3, (Fraction(0), Fraction(1), Fraction(4), Fraction(13)))).ok
    bad = check_pcs(PcsPrefix(QP3, (Fraction(0), Fraction(3), Fraction(4))))
    assert not bad.ok and bad.violation == (0, 1, 2)
    assert check_pcs(PcsPrefix(QP3, (Fraction(0), Fraction(3), Fraction(12)))).gammas == (1, 2)


def test_hensel_ladder_values():
    gen = parse_generator(HENSEL)
    assert gen.elements(len(HENSEL_LADDER)) == HENSEL_LADDER


def test_hensel_ladder_against_modular_square_roots():
    """Each a_rho is the reduction of sqrt(2) = 3 mod 7 to [0, 7^k) for a k that factorint certifies."""
    gen = parse_generator(HENSEL)
    for a in gen.elements(12):
        a = int(a)
        fac = sympy.factorint(a * a - 2)
        k = fac.get(7, 0)
        assert k >= 1
        roots = [r for r in sqrt_mod(2, 7**k, all_roots=True) if r % 7 == 3]
        assert roots == [a]
    gammas = gen.gammas(11)
    assert all(x < y for x, y in zip(gammas, gammas[1:]))


def test_hensel_conjugate_and_errors():
    gen = parse_generator("hensel:qp:7;g=x^2-2;a0=4")
    assert gen.elements(2) == [4, 39]
    with pytest.raises(NonSimpleRoot):
        parse_generator("hensel:qp:7;g=x^2;a0=0")
    with pytest.raises(ValueError):
        parse_generator("hensel:qp:7;g=x^2-2;a0=1")
    with pytest.raises(ValueError):
        parse_generator("hensel:fpt:7;g=x^2-2;a0=3")
    with pytest.raises(ValueError):
        parse_generator("series:qp:3;expr=nope")


def test_series_elements():
    gen = parse_generator("series:qp:3;expr=geom-squares")
    assert gen.elements(4) == [1, 1 + 3, 1 + 3 + 81, 1 + 3 + 81 + 3**9]
    assert gen.gammas(3) == [1, 4, 9]
    t = FPT3.t()
    gen = parse_generator("series:fpt:3;expr=geom")
    assert gen.elements(3) == [FPT3.one(), 1 + t, 1 + t + t * t]


def test_fixed_value_examples():
    gen = parse_generator(HENSEL)
    rep = fixed_value(gen, P(QP7, "x"))
    assert rep.fixed and rep.value == 0
    rep = fixed_value(gen, P(QP7, "x-3"))
    assert rep.fixed and rep.value == 1 and rep.rho_f == 1
    rep = fixed_value(gen, P(QP7, "x^2-2"))
    assert rep.status == "increasing"
    assert all(a < b for a, b in zip(rep.values[rep.start:], rep.values[rep.start + 1:]))
    assert "increasing_from" in rep.to_dict()
    with pytest.raises(ValueError):
        fixed_value(gen, P(QP7, "x"), window=2)


def test_fixed_value_geom_limit_polynomial():
    # 2x + 1 vanishes at the limit -1/2 of the geometric series over Q_3
    gen = parse_generator("series:qp:3;expr=geom")
    rep = fixed_value(gen, P(QP3, "2*x+1"))
    assert rep.status == "increasing"


def test_dominant_index_examples():
    gen = parse_generator(HENSEL)
    rep = dominant_index(gen, P(QP7, "x^2-2"))
    assert rep.h == 1 and rep.consistent and not rep.f_fixed
    assert rep.predicted == rep.observed_values == rep.observed_differences
    rep = dominant_index(gen, P(QP7, "x^2-9"))
    assert rep.f_fixed and rep.difference_prediction_holds and not rep.value_prediction_holds
    with pytest.raises(DegenerateConstant):
        dominant_index(gen, P(QP7, "5"))


def test_dominant_index_positive_characteristic():
    gen = parse_generator("series:fpt:3;expr=geom")
    rep = dominant_index(gen, P(FPT3, "x^3"))
    assert is_power_of(rep.h, 3) and rep.difference_prediction_holds


def test_classify_type_examples():
    rep = classify_type(parse_generator(HENSEL), 2)
    assert rep.algebraic and rep.q_min == P(QP7, "x^2-2")
    rep = classify_type(parse_generator("series:qp:5;expr=geom-squares"), 2, grid=Grid((0, 1, -1), 0, 1))
    assert not rep.algebraic and rep.to_dict()["up_to_degree"] == 2
    # the limit -1/2 of the geometric series lies off the grid, so the sweep can
    # only claim transcendence up to the bound; the claim is never stronger
    rep = classify_type(parse_generator("series:qp:3;expr=geom"), 1, grid=Grid((0, 1, -1, 2, -2), -1, 1))
    assert rep.kind == "transcendental-up-to" and rep.q_min is None
    with pytest.raises(ValueError):
        classify_type(parse_generator("hensel:qp:7;g=x^2-9;a0=3"), 2)


def test_is_power_of():
    assert [n for n in range(1, 30) if is_power_of(n, 3)] == [1, 3, 9, 27]
    assert [n for n in range(1, 5) if is_power_of(n, 1)] == [1]


@pytest.mark.parametrize(
    "desc", [HENSEL, "hensel:qp:5;g=x^2+1;a0=2", "series:qp:5;expr=geom-squares", "series:fpt:2;expr=geom"]
)
@given(n=st.integers(3, 9))
def test_generated_prefixes_are_pseudo_convergent(desc, n):
    gen = parse_generator(desc)
    chk = check_pcs(gen.prefix(n))
    assert chk.ok
    # gamma_rho = v(a_{rho+1} - a_rho) recomputed from the elements
    elems = gen.elements(n)
    assert list(chk.gammas) == [gen.field.val(elems[i + 1] - elems[i]) for i in range(n - 1)]
    # the distance to the limit equals the next gap
    assert all(gen.limit_distance(r) == gen.gamma(r) for r in range(n - 1))


@given(st.lists(st.integers(-50, 50), min_size=3, max_size=6, unique=True))
def test_check_pcs_matches_definition(ints):
    elems = tuple(Fraction(a) for a in ints)
    v = QP5.val
    expected = all(
        v(elems[s] - elems[r]) < v(elems[t] - elems[s])
        for r in range(len(elems))
        for s in range(r + 1, len(elems))
        for t in range(s + 1, len(elems))
    )
    assert check_pcs(PcsPrefix(QP5, elems)).ok == expected


def test_indeterminate_carries_report():
    # a tiny window cannot separate the patterns for a polynomial whose value jumps late
    gen = parse_generator("series:qp:3;expr=geom")
    try:
        rep = fixed_value(gen, P(QP3, "x-3280"), window=3)
    except Indeterminate as exc:
        assert exc.report is not None and exc.report.status == "indeterminate"
    else:
        assert rep.values[-1] is not INF


def test_classify_type_below_minimal_degree():
    rep = classify_type(parse_generator(HENSEL), 1)
    assert rep.kind == "transcendental-up-to" and rep.degree_bound == 1


def test_hensel_ladder_law():
    # v(g(a_rho)) = rho + v(g(a_0)) while no 7-adic digit of the root vanishes
    gen = parse_generator(HENSEL)
    vals = [QP7.val(gen.g.eval(a)) for a in gen.elements(8)]
    assert vals == list(range(1, 9))
