from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from valkey.fields import PAdicField, RatFunc, TSeriesField, parse_field
from valkey.poly import Poly

settings.register_profile(
    "valkey",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("valkey")

QP3 = parse_field("qp:3")
QP5 = parse_field("qp:5")
QP7 = parse_field("qp:7")
FPT2 = parse_field("fpt:2")
FPT3 = parse_field("fpt:3")
FPT5 = parse_field("fpt:5")

FIELDS = [QP3, QP5, QP7, FPT2, FPT3, FPT5]


def P(F, text: str) -> Poly:
    return Poly.parse(F, text)


def rationals(max_num: int = 60, max_den: int = 30):
    return st.builds(
        Fraction,
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


def tpolys(p: int, max_deg: int = 3):
    return st.lists(st.integers(0, p - 1), min_size=1, max_size=max_deg + 1).map(tuple)


def ratfuncs(p: int, max_deg: int = 2):
    den = st.lists(st.integers(0, p - 1), min_size=0, max_size=max_deg).map(lambda c: tuple(c) + (1,))
    return st.builds(lambda n, d, k: RatFunc.make(n, d, p) * RatFunc.t_power(k, p), tpolys(p, max_deg), den,
                     st.integers(-1, 2))


def elements(F):
    if isinstance(F, PAdicField):
        return st.builds(lambda a, k: a * Fraction(F.p) ** k, rationals(), st.integers(-2, 2))
    return ratfuncs(F.p)


def nonzero_elements(F):
    return elements(F).filter(bool)


def polys(F, max_deg: int = 4, min_deg: int = 0):
    return st.lists(elements(F), min_size=min_deg + 1, max_size=max_deg + 1).map(lambda cs: Poly(F, cs)).filter(
        lambda f: f.degree >= min_deg
    )


def monic_polys_st(F, min_deg: int = 1, max_deg: int = 3):
    return st.lists(elements(F), min_size=min_deg, max_size=max_deg).map(lambda cs: Poly(F, list(cs) + [F.one()]))


@pytest.fixture(params=FIELDS, ids=lambda F: F.descriptor)
def field(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
