"""Bridges between pseudo-convergent sequences and key polynomials.

* ``verify_truncation_agreement`` -- along x - a_rho, the truncation
  v_rho(f) equals v(f) once the value of f is fixed, and stays strictly below
  it at every index when it is not;
* ``verify_theorem_1_2`` -- transcendental sequences give the complete set
  {x - a_rho}, algebraic ones give a limit key polynomial;
* ``find_limit_in_base`` -- bounded search for a pseudo-limit inside K.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .errors import LimitInK
from .fields import PAdicField, RatFunc, TSeriesField, fp_divmod, fp_mul, fp_sub, _trim
from .grid import DEFAULT_GRID, Grid, monic_polys
from .keypoly import DEFAULT_BUDGET, LimitReport, classify_limit, truncate
from .pcs import HenselGenerator, PcsGenerator, SeriesGenerator, TypeReport, classify_type, fixed_value
from .poly import Poly
from .values import INF, format_value
from .xval import RootValuation, SeriesValuation, XValuation, _LimitValuation

__all__ = [
    "AgreementReport",
    "verify_truncation_agreement",
    "Theorem12Report",
    "verify_theorem_1_2",
    "find_limit_in_base",
    "limit_valuation",
]


def limit_valuation(gen: PcsGenerator) -> _LimitValuation:
    """The valuation f -> v(f(z)) for the limit z of ``gen``."""
    if isinstance(gen, HenselGenerator):
        return RootValuation(gen.field, gen.g, gen.a0, gen.cap)
    if isinstance(gen, SeriesGenerator):
        return SeriesValuation(gen)
    raise TypeError(f"no limit valuation for {gen!r}")


# ---------------------------------------------------------------------------


@dataclass
class AgreementReport:
    f: Poly
    fixed: bool
    start: int
    value: object
    truncations: list
    direct: list
    ok: bool
    failures: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "f": str(self.f),
            "case": "fixed" if self.fixed else "unfixed",
            "start": self.start,
            "value": format_value(self.value),
            "v_rho": [format_value(v) for v in self.truncations],
            "v_f_a_rho": [format_value(v) for v in self.direct],
            "ok": self.ok,
            "failures": self.failures,
        }


def verify_truncation_agreement(V: XValuation, gen: PcsGenerator, f: Poly, window: int = 6) -> AgreementReport:
    """Check the fixed/unfixed dichotomy for v_rho = v_{x - a_rho} on a window.

    Fixed f: v_rho(f) = v(f) for every rho from the stabilisation index on.
    Unfixed f: v_rho(f) < v(f) at every index.  On the same tail the identity
    v_rho(f) = v(f(a_rho)) is checked as well.
    """
    if isinstance(V, _LimitValuation) and V.gen.descriptor != gen.descriptor:
        raise ValueError(f"valuation {V} is not the limit of {gen.descriptor}")
    F = V.field
    nu = V(f)
    if f.is_constant():
        fixed, start = True, 0
    else:
        rep = fixed_value(gen, f, window)
        fixed = rep.fixed
        start = rep.rho_f if fixed else rep.start
        window = len(rep.values)
    truncs, direct, failures = [], [], []
    for rho in range(window):
        a = gen.element(rho)
        t = truncate(V, Poly.linear(F, a), f)
        d = F.val(f.eval(a))
        truncs.append(t)
        direct.append(d)
        if fixed:
            if rho >= start and t != nu:
                failures.append({"rho": rho, "expected": "v_rho(f) = v(f)", "v_rho": format_value(t)})
        elif not t < nu:
            failures.append({"rho": rho, "expected": "v_rho(f) < v(f)", "v_rho": format_value(t)})
        if rho >= start and t != d:
            failures.append({"rho": rho, "expected": "v_rho(f) = v(f(a_rho))", "v_rho": format_value(t),
                             "v_f_a": format_value(d)})
    return AgreementReport(f, fixed, start, nu, truncs, direct, not failures, failures)


# ---------------------------------------------------------------------------
# pseudo-limits inside K


def _rational_reconstruct(a: int, m: int) -> Optional[Fraction]:
    """r/s with r = a*s mod m, |r|, s <= sqrt(m/2) (extended Euclid), or None."""
    bound = int((m // 2) ** 0.5)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


def _ratfunc_reconstruct(a: RatFunc, n: int, p: int) -> Optional[RatFunc]:
    """r/s with r = a*s mod t^n and deg r, deg s < n/2, or None (a a polynomial)."""
    if a.den != (1,):
        return None
    m = _trim([0] * n + [1])
    r0, r1 = m, fp_divmod(a.num, m, p)[1]
    s0, s1 = (), (1,)
    half = n // 2
    while len(r1) - 1 >= half and r1:
        q, rem = fp_divmod(r0, r1, p)
        r0, r1 = r1, rem
        s0, s1 = s1, fp_sub(s0, fp_mul(q, s1, p), p)
    if not s1 or len(s1) - 1 >= half + 1:
        return None
    return RatFunc.make(r1, s1, p)


def _is_pseudo_limit(gen: PcsGenerator, c, n: int) -> bool:
    val = gen.field.val
    return all(val(c - gen.element(rho)) == gen.gamma(rho) for rho in range(n))


def find_limit_in_base(gen: PcsGenerator, window: int = 8, grid: Grid = DEFAULT_GRID):
    """A pseudo-limit of the sequence inside K found by bounded search, or None.

    Candidates are grid elements plus a rational reconstruction of a deep
    element; each candidate must satisfy v(c - a_rho) = gamma_rho on twice the
    window.  A ``None`` answer is bounded-scale evidence only.
    """
    F = gen.field
    check = 2 * window
    cands = list(grid.elements(F))
    deep = gen.element(check)
    prec = gen.gamma(check - 1)
    if prec is not INF and prec >= 2:
        n = int(prec)
        if isinstance(F, PAdicField) and deep.denominator == 1:
            c = _rational_reconstruct(int(deep), F.p ** n)
            if c is not None:
                cands.append(c)
        elif isinstance(F, TSeriesField):
            c = _ratfunc_reconstruct(deep, n, F.p)
            if c is not None:
                cands.append(c)
    for c in cands:
        if _is_pseudo_limit(gen, c, check):
            return c
    return None


# ---------------------------------------------------------------------------


@dataclass
class Theorem12Report:
    generator: str
    type_report: TypeReport
    branch: str  # "algebraic" | "transcendental"
    limit_report: Optional[LimitReport] = None
    witnesses: dict = dc_field(default_factory=dict)  # f -> rho
    unwitnessed: list = dc_field(default_factory=list)
    corpus_size: int = 0

    @property
    def ok(self) -> bool:
        if self.branch == "algebraic":
            return self.limit_report is not None and self.limit_report.overall
        return not self.unwitnessed

    def to_dict(self) -> dict:
        d = {
            "generator": self.generator,
            "branch": self.branch,
            "type": self.type_report.to_dict(),
            "ok": self.ok,
        }
        if self.limit_report is not None:
            d["limit_key"] = self.limit_report.to_dict()
        if self.branch == "transcendental":
            d["corpus_size"] = self.corpus_size
            d["witnesses"] = {str(f): rho for f, rho in self.witnesses.items()}
            d["unwitnessed"] = [str(f) for f in self.unwitnessed]
        return d


def verify_theorem_1_2(
    gen: PcsGenerator,
    degree_bound: int,
    window: int = 8,
    grid: Grid = DEFAULT_GRID,
    budget: int = DEFAULT_BUDGET,
) -> Theorem12Report:
    """Check both branches of the sequence / key-polynomial correspondence.

    Raises LimitInK when the sequence visibly has a pseudo-limit in K.
    """
    lim = find_limit_in_base(gen, window, grid)
    if lim is not None:
        raise LimitInK(f"{gen.descriptor} has the pseudo-limit {gen.field.format_elem(lim)} in K", lim)
    tr = classify_type(gen, degree_bound, window, grid)
    V = limit_valuation(gen)
    if tr.algebraic:
        rep = classify_limit(V, tr.q_min, gen, budget=budget, grid=grid, window=window)
        return Theorem12Report(gen.descriptor, tr, "algebraic", limit_report=rep)
    F = gen.field
    elems = grid.elements(F)
    witnesses, missing, n = {}, [], 0
    family = [Poly.linear(F, a) for a in gen.elements(window)]
    for d in range(1, degree_bound + 1):
        for f in monic_polys(F, d, elems):
            n += 1
            nu = V(f)
            rho = next((r for r, q in enumerate(family) if truncate(V, q, f) == nu), None)
            if rho is None:
                missing.append(f)
            else:
                witnesses[f] = rho
    return Theorem12Report(gen.descriptor, tr, "transcendental", witnesses=witnesses, unwitnessed=missing,
                           corpus_size=n)
