"""Named property suites.

Each suite runs one family of statements on a deterministic sample (seeded
``random.Random``) and returns a ``SuiteReport`` listing every violation with
its witness.  ``truncation-counterexample`` is the one suite whose property is
*expected* to fail: it exhibits the non-key q = x^2 + 1 for which the
truncation is not multiplicative.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .errors import BudgetExhausted, Indeterminate, LimitInK, NotFixed
from .fields import PAdicField, RatFunc, parse_field
from .grid import DEFAULT_GRID, monic_polys
from .keypoly import (
    Certified,
    Falsified,
    alpha_psi,
    build_complete_set,
    classify_limit,
    epsilon,
    falsify,
    is_key,
    support_set,
    truncate,
)
from .limits import limit_valuation, verify_theorem_1_2, verify_truncation_agreement
from .pcs import dominant_index, fixed_value, is_power_of, parse_generator
from .poly import Factor, Poly, hasse_derivative, irreducible_bounded, poly_divmod
from .values import INF, format_value
from .xval import AugmentedValuation, GaussValuation, RootValuation, XValuation, _LimitValuation, parse_valuation

__all__ = ["SuiteReport", "SUITES", "run_suite", "run_all", "key_pool", "certified_keys", "random_poly"]

MAX_RECORDED = 25


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list = dc_field(default_factory=list)
    skipped: int = 0
    keys: list = dc_field(default_factory=list)
    details: dict = dc_field(default_factory=dict)
    expect_violation: bool = False
    seconds: float = 0.0

    @property
    def violated(self) -> bool:
        return bool(self.failures)

    @property
    def passed(self) -> bool:
        """True when the outcome is the one the statement predicts."""
        return self.violated if self.expect_violation else not self.violated

    def fail(self, **witness) -> None:
        if len(self.failures) < MAX_RECORDED:
            self.failures.append(witness)
        else:
            self.details["unrecorded_failures"] = self.details.get("unrecorded_failures", 0) + 1

    def check(self, ok: bool, **witness) -> None:
        self.checked += 1
        if not ok:
            self.fail(**witness)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "violated": self.violated,
            "expect_violation": self.expect_violation,
            "checked": self.checked,
            "skipped": self.skipped,
            "failures": self.failures,
            "keys": self.keys,
            "details": self.details,
        }


# ---------------------------------------------------------------------------
# sampling


def random_elem(F, rng: random.Random, zero_ok: bool = True):
    while True:
        if isinstance(F, PAdicField):
            c = Fraction(rng.randint(-9, 9), rng.choice((1, 1, 2, 5, 7, 11)))
            c *= Fraction(F.p) ** rng.randint(-1, 2)
        else:
            num = [rng.randrange(F.p) for _ in range(rng.randint(1, 3))]
            den = [rng.randrange(F.p) for _ in range(rng.randint(0, 1))] + [1]
            c = RatFunc.make(tuple(num), tuple(den), F.p) * F.t() ** rng.randint(-1, 2)
        if zero_ok or c:
            return c


def random_poly(F, rng: random.Random, max_deg: int, min_deg: int = 0, monic: bool = False) -> Poly:
    d = rng.randint(min_deg, max_deg)
    cs = [random_elem(F, rng) for _ in range(d)]
    cs.append(F.one() if monic else random_elem(F, rng, zero_ok=False))
    return Poly(F, cs)


# ---------------------------------------------------------------------------
# the pool of certified keys


KEY_POOL_SPEC = [
    ("gauss:qp:3:1", ["x", "x-3", "x+1", "x-1/3"]),
    ("aug:(gauss:qp:3:1);Q=x-3;g=2", ["x-3", "x-12", "x"]),
    ("aug:(gauss:qp:3:0);Q=x^2+1;g=1", ["x", "x-1", "x^2+1"]),
    ("aug:(aug:(gauss:qp:3:0);Q=x^2+1;g=1);Q=x^2+1;g=3/2", ["x^2+1", "x"]),
    ("root:qp:7;g=x^2-2;a0=3", ["x-3", "x-10", "x-108", "x^2-2"]),
    ("gauss:fpt:3:1", ["x", "x-t", "x+1"]),
    ("aug:(gauss:fpt:3:1/2);Q=x^2-t;g=3/2", ["x", "x^2-t"]),
    ("aug:(gauss:fpt:3:1/3);Q=x^3-t;g=2", ["x", "x^3-t"]),
    ("gauss:qp:5:0", ["x", "x+2"]),
]


@lru_cache(maxsize=None)
def _valuation(desc: str) -> XValuation:
    return parse_valuation(desc)


@lru_cache(maxsize=None)
def key_pool() -> tuple:
    """(V, Q, status) for the fixed pool; every entry is expected to certify."""
    out = []
    for desc, keys in KEY_POOL_SPEC:
        V = _valuation(desc)
        for s in keys:
            Q = Poly.parse(V.field, s)
            out.append((V, Q, is_key(V, Q)))
    return tuple(out)


@lru_cache(maxsize=None)
def certified_keys(seed: int = 0, samples: int = 20) -> tuple:
    """Certified keys gathered from the pool, Psi samples, complete sets and random linear keys."""
    rng = random.Random(seed)
    seen = {}
    for V, Q, st in key_pool():
        if isinstance(st, Certified):
            seen[(V, Q)] = st
    for V, Q, st in list(key_pool()):
        if not isinstance(st, Certified) or epsilon(V, Q).epsilon is INF:
            continue
        ap = _alpha(V, Q, max(Q.degree, 2))
        for Qp in ap.psi_samples[:3]:
            if (V, Qp) not in seen:
                st2 = is_key(V, Qp)
                if isinstance(st2, Certified):
                    seen[(V, Qp)] = st2
    for V in sorted({V for V, _, _ in key_pool()}, key=lambda V: V.descriptor):
        for _ in range(max(1, samples // 10)):
            Q = Poly.linear(V.field, random_elem(V.field, rng))
            seen.setdefault((V, Q), is_key(V, Q))
    return tuple((V, Q, st) for (V, Q), st in seen.items())


@lru_cache(maxsize=None)
def _alpha(V, Q, bound):
    return alpha_psi(V, Q, bound)


def _by_valuation(keys) -> dict:
    groups: dict = {}
    for V, Q, _ in keys:
        groups.setdefault(V, []).append(Q)
    return groups


def _key_label(V, Q) -> str:
    return f"{V.descriptor} | {Q}"


# ---------------------------------------------------------------------------
# suites


def suite_lemma_2_3(seed: int, samples: int) -> SuiteReport:
    """Smaller-degree bound, the derivative bound for products, and the remainder law."""
    rep = SuiteReport("lemma-2-3")
    rng = random.Random(seed)
    for V, Q, st in key_pool():
        if Q.degree < 2:
            continue
        rep.keys.append(_key_label(V, Q))
        eps = epsilon(V, Q).epsilon
        F = V.field
        for _ in range(samples):
            f = random_poly(F, rng, Q.degree - 1, 1)
            g = random_poly(F, rng, Q.degree - 1, 1)
            if eps is not INF:
                for h in (f, f * g):
                    vh = V(h)
                    for b in range(1, h.degree + 1):
                        rep.check(V(hasse_derivative(h, b)) > vh - b * eps,
                                  key=_key_label(V, Q), f=str(h), b=b, law="v(d_b h) > v(h) - b*eps")
            hs = [random_poly(F, rng, Q.degree - 1, 0) for _ in range(rng.randint(1, 4))]
            prod = Poly.const(F, F.one())
            for h in hs:
                prod = prod * h
            q, r = poly_divmod(prod, Q)
            vqQ = V(q * Q)
            rep.check(V(r) == V(prod) and V(r) < vqQ, key=_key_label(V, Q), factors=[str(h) for h in hs],
                      law="v(r) = v(prod h_i) < v(qQ)")
    return rep


def suite_powers_of_p(seed: int, samples: int) -> SuiteReport:
    """I(Q) consists of powers of the exponent characteristic; keys are never reducible."""
    rep = SuiteReport("prop-powers-of-p")
    keys = list(certified_keys(seed, samples))
    rng = random.Random(seed)
    # perturbations Q + c of degree >= 2 pool keys, kept when certified
    for V, Q, st in key_pool():
        if Q.degree >= 2 and epsilon(V, Q).epsilon is not INF:
            for _ in range(max(1, samples // 10)):
                c = random_elem(V.field, rng) * V.field.uniformizer() ** 3
                Qp = Q + Poly.const(V.field, c)
                st2 = is_key(V, Qp)
                if isinstance(st2, Certified):
                    keys.append((V, Qp, st2))
    for V, Q, st in keys:
        if not isinstance(st, Certified):
            continue
        rep.keys.append(_key_label(V, Q))
        p = V.field.exponent_characteristic
        I = epsilon(V, Q).I
        rep.check(all(is_power_of(b, p) for b in I), key=_key_label(V, Q), I=I, law="I(Q) in powers of p")
        rep.check(not isinstance(irreducible_bounded(Q), Factor), key=_key_label(V, Q), law="key is irreducible")
    return rep


def suite_truncation_valuation(seed: int, samples: int) -> SuiteReport:
    """v_Q multiplicative and superadditive for certified keys Q."""
    rep = SuiteReport("prop-truncation-valuation")
    rng = random.Random(seed)
    for V, Q, st in key_pool():
        if not isinstance(st, Certified):
            continue
        rep.keys.append(_key_label(V, Q))
        F = V.field
        for _ in range(samples):
            f = random_poly(F, rng, 4)
            g = random_poly(F, rng, 4)
            tf, tg = truncate(V, Q, f), truncate(V, Q, g)
            rep.check(truncate(V, Q, f * g) == tf + tg, key=_key_label(V, Q), f=str(f), g=str(g),
                      law="v_Q(fg) = v_Q(f) + v_Q(g)")
            rep.check(truncate(V, Q, f + g) >= min(tf, tg), key=_key_label(V, Q), f=str(f), g=str(g),
                      law="v_Q(f+g) >= min")
    return rep


def suite_truncation_counterexample(seed: int, samples: int) -> SuiteReport:
    """q = x^2 + 1 over Gauss(qp:3, 1): v_q(x^2 - 9) = 0 < 2 = v_q(x - 3) + v_q(x + 3)."""
    rep = SuiteReport("truncation-counterexample", expect_violation=True)
    V = _valuation("gauss:qp:3:1")
    F = V.field
    q = Poly.parse(F, "x^2+1")
    f, g = Poly.parse(F, "x-3"), Poly.parse(F, "x+3")
    lhs, rhs = truncate(V, q, f * g), truncate(V, q, f) + truncate(V, q, g)
    rep.details.update({"q": str(q), "product": str(f * g), "v_q(fg)": format_value(lhs),
                        "v_q(f)+v_q(g)": format_value(rhs)})
    rep.check(lhs == rhs, q=str(q), witness=[str(f), str(g)], v_q_fg=format_value(lhs),
              sum=format_value(rhs), law="v_q(fg) = v_q(f) + v_q(g)")
    st = is_key(V, q)
    rep.details["q_status"] = st.summary()
    return rep


def _dificil_checks(rep: SuiteReport, V, Q, f) -> None:
    eps = epsilon(V, Q).epsilon
    tf = truncate(V, Q, f)
    S, _ = support_set(V, Q, f)
    ratios = {}
    for b in range(1, f.degree + 1):
        d = hasse_derivative(f, b)
        td = truncate(V, Q, d)
        if td is INF:
            continue
        r = INF if tf is INF else (tf - td) / b
        ratios[b] = (r, td, V(d))
        rep.check(r <= eps, key=_key_label(V, Q), f=str(f), b=b, law="(v_Q(f) - v_Q(d_b f))/b <= eps")
    if S != [0] and f.degree >= 1:
        rep.check(any(r == eps for r, _, _ in ratios.values()), key=_key_label(V, Q), f=str(f), S=S,
                  law="equality attained when S_Q(f) != {0}")
    hit = [b for b, (r, td, vd) in ratios.items() if r == eps and td == vd]
    if hit and f.degree >= 1:
        ef = epsilon(V, f).epsilon
        rep.check(ef >= eps, key=_key_label(V, Q), f=str(f), b=hit[0], law="eps(f) >= eps(Q)")
        if V(f) > tf:
            rep.check(ef > eps, key=_key_label(V, Q), f=str(f), b=hit[0], law="eps(f) > eps(Q)")
        rep.details["implication_triggered"] = rep.details.get("implication_triggered", 0) + 1


def suite_dificil(seed: int, samples: int) -> SuiteReport:
    """Truncated epsilon bound, its equality case and the resulting comparison of levels."""
    rep = SuiteReport("prop-dificil")
    rng = random.Random(seed)
    for V, Q, st in key_pool():
        if not isinstance(st, Certified):
            continue
        rep.keys.append(_key_label(V, Q))
        F = V.field
        structured = [Q * Poly.x(F), Q * Q + Poly.x(F), Q + Poly.const(F, F.uniformizer())]
        for f in structured + [random_poly(F, rng, 2 * Q.degree + 1, 1) for _ in range(samples)]:
            _dificil_checks(rep, V, Q, f)
    return rep


def suite_comp(seed: int, samples: int) -> SuiteReport:
    """Pairwise comparison of certified keys of the same valuation."""
    rep = SuiteReport("prop-comp")
    keys = [(V, Q, st) for V, Q, st in certified_keys(seed, samples) if isinstance(st, Certified)]
    for V, Qs in sorted(_by_valuation(keys).items(), key=lambda kv: kv[0].descriptor):
        eps = {Q: epsilon(V, Q).epsilon for Q in Qs}
        for Q in Qs:
            rep.keys.append(_key_label(V, Q))
            for Qp in Qs:
                if Q == Qp:
                    continue
                lab = {"Q": str(Q), "Q'": str(Qp), "val": V.descriptor}
                if Q.degree < Qp.degree:
                    rep.check(eps[Q] < eps[Qp], law="deg < implies eps <", **lab)
                if eps[Q] < eps[Qp]:
                    rep.check(truncate(V, Q, Qp) < V(Qp), law="eps < implies v_Q(Q') < v(Q')", **lab)
                if Q.degree == Qp.degree:
                    a = V(Q) < V(Qp)
                    b = truncate(V, Q, Qp) < V(Qp)
                    c = eps[Q] < eps[Qp]
                    rep.check(a == b == c, law="equal-degree equivalence", **lab, flags=[a, b, c])
    return rep


def suite_lemma_psi(seed: int, samples: int) -> SuiteReport:
    """Members of Psi(Q) are keys of strictly larger level."""
    rep = SuiteReport("lemma-psi")
    for V, Q, st in key_pool():
        if not isinstance(st, Certified) or epsilon(V, Q).epsilon is INF:
            continue
        ap = _alpha(V, Q, max(Q.degree, 2))
        if ap.alpha is None:
            rep.skipped += 1
            continue
        rep.keys.append(_key_label(V, Q))
        eQ = epsilon(V, Q).epsilon
        for Qp in ap.psi_samples[: max(2, samples // 10)]:
            st2 = is_key(V, Qp)
            rep.check(isinstance(st2, Certified), Q=str(Q), psi=str(Qp), val=V.descriptor,
                      status=st2.summary(), law="Psi member is a key")
            rep.check(epsilon(V, Qp).epsilon > eQ, Q=str(Q), psi=str(Qp), val=V.descriptor,
                      law="eps(Q) < eps(Q')")
    return rep


def suite_key_characterization(seed: int, samples: int) -> SuiteReport:
    """Certificates re-verify; falsifiers re-verify; the two never coexist."""
    rep = SuiteReport("thm-key-characterization")
    rng = random.Random(seed)
    cases = [(V, Q) for V, Q, _ in key_pool()]
    Vs = sorted({V for V, _ in cases}, key=lambda V: V.descriptor)
    for _ in range(samples):
        V = rng.choice(Vs)
        cases.append((V, random_poly(V.field, rng, 3, 2, monic=True)))
    for V, Q in cases:
        st = is_key(V, Q)
        lab = {"val": V.descriptor, "Q": str(Q), "status": st.summary()}
        if isinstance(st, Certified):
            rep.check(falsify(V, Q) is None, law="certified key has no falsifier", **lab)
            rep.check(not isinstance(irreducible_bounded(Q), Factor), law="certified key irreducible", **lab)
            if st.reason == "PsiMember":
                Qm = st.q_minus
                rep.check(truncate(V, Qm, Q) < V(Q) and Qm.degree <= Q.degree, law="Psi certificate", **lab)
            elif st.reason == "LimitWitness":
                rep.check(classify_limit(V, Q, V.gen).overall, law="limit certificate", **lab)
        elif isinstance(st, Falsified):
            w = st.witness
            rep.check(w.degree < Q.degree and epsilon(V, w).epsilon >= epsilon(V, Q).epsilon,
                      law="falsifier re-verifies", **lab)
        else:
            rep.skipped += 1
    rep.details["cases"] = len(cases)
    return rep


COMPLETE_SET_CASES = [
    ("gauss:qp:3:1", 3, "0,1,-1,3,-3@0..0"),
    ("aug:(gauss:qp:3:1);Q=x-3;g=2", 2, "0,1,-1,3,-3@0..0"),
    ("aug:(gauss:qp:3:0);Q=x^2+1;g=1", 2, "0,1,-1,3,-3@0..0"),
    ("root:qp:7;g=x^2-2;a0=3", 2, "0,1,-1,7,-7@0..0"),
    ("aug:(gauss:fpt:3:1/2);Q=x^2-t;g=3/2", 2, "0,1,-1@0..1"),
]


def complete_set_corpus(V: XValuation, degree_bound: int, grid_spec: str) -> list:
    """All monic polynomials of degree <= bound over a small coefficient grid, plus chain keys."""
    from .grid import Grid

    F = V.field
    elems = sorted({F.coerce(c) * F.uniformizer() ** k
                    for c in Grid.parse(grid_spec).multipliers
                    for k in range(Grid.parse(grid_spec).kmin, Grid.parse(grid_spec).kmax + 1)},
                   key=lambda e: Poly.const(F, e).sort_key())
    corpus = [f for d in range(1, degree_bound + 1) for f in monic_polys(F, d, elems)]
    if isinstance(V, RootValuation):
        corpus.append(V.g)
    return list(dict.fromkeys(corpus))


def suite_thm_1_1(seed: int, samples: int) -> SuiteReport:
    """Complete sets: every corpus member witnessed, witnesses exact, levels increasing."""
    rep = SuiteReport("thm-1-1")
    for desc, bound, gspec in COMPLETE_SET_CASES:
        V = _valuation(desc)
        corpus = complete_set_corpus(V, bound, gspec)
        res = build_complete_set(V, bound, corpus)
        rep.details[desc] = {"lambda": [str(Q) for Q in res.lambda_], "corpus": len(corpus),
                             "limit": [str(k.Q) for k in res.keys if k.limit]}
        rep.check(res.complete, val=desc, uncovered=[str(f) for f in res.uncovered[:5]], law="complete")
        rep.check(res.verify(V), val=desc, law="witnesses re-verify and eps increasing")
        for k in res.keys:
            rep.keys.append(_key_label(V, k.Q))
    return rep


THEOREM_1_2_CASES = [
    ("hensel:qp:7;g=x^2-2;a0=3", "algebraic"),
    ("series:qp:5;expr=geom-squares", "transcendental"),
    ("series:fpt:3;expr=geom-squares", "transcendental"),
    ("series:qp:3;expr=geom", "limit-in-K"),
]


def suite_thm_1_2(seed: int, samples: int) -> SuiteReport:
    rep = SuiteReport("thm-1-2")
    for desc, expected in THEOREM_1_2_CASES:
        gen = parse_generator(desc)
        try:
            res = verify_theorem_1_2(gen, 2, 8 if expected == "algebraic" else 6)
        except LimitInK as exc:
            rep.details[desc] = {"branch": "limit-in-K", "limit": gen.field.format_elem(exc.limit)}
            rep.check(expected == "limit-in-K", gen=desc, law="hypothesis check")
            continue
        rep.details[desc] = {"branch": res.branch, "ok": res.ok}
        rep.check(res.branch == expected and res.ok, gen=desc, branch=res.branch, law="theorem branch holds")
    return rep


def suite_cor_truncation(seed: int, samples: int) -> SuiteReport:
    rep = SuiteReport("cor-truncation-agreement")
    rng = random.Random(seed)
    gen = parse_generator("hensel:qp:7;g=x^2-2;a0=3")
    V = limit_valuation(gen)
    F = V.field
    corpus = [Poly.parse(F, s) for s in ("5", "x", "x-3", "x-10", "x^2-2", "x^2+1", "x^3-2*x")]
    corpus += [random_poly(F, rng, 3, 1) for _ in range(samples)]
    for f in corpus:
        try:
            r = verify_truncation_agreement(V, gen, f)
        except Indeterminate:
            rep.skipped += 1
            continue
        rep.check(r.ok, f=str(f), failures=r.failures, law="truncation dichotomy")
    return rep


LEMMA_8_CASES = [
    ("hensel:qp:7;g=x^2-2;a0=3", ["x^2-2", "x^3-2*x", "x^2+x-2", "x^2-9"]),
    ("series:fpt:3;expr=geom", ["x^3", "x^3+x", "x^3-x^2"]),
    ("series:qp:5;expr=geom-squares", ["x^2", "x^2-x"]),
]


def suite_lemma_8(seed: int, samples: int) -> SuiteReport:
    rep = SuiteReport("lemma-8")
    for desc, polys in LEMMA_8_CASES:
        gen = parse_generator(desc)
        for s in polys:
            f = Poly.parse(gen.field, s)
            try:
                r = dominant_index(gen, f, 6)
            except (NotFixed, Indeterminate):
                rep.skipped += 1
                continue
            rep.details[f"{desc} | {s}"] = {"h": r.h}
            rep.check(r.consistent, gen=desc, f=s, report=r.to_dict(), law="dominant index")
    return rep


def suite_remark_ii(seed: int, samples: int) -> SuiteReport:
    """Taylor-expansion dichotomy for epsilon(f) against v(x - a)."""
    rep = SuiteReport("remark-ii")
    rng = random.Random(seed)
    Vs = sorted({V for V, _, _ in key_pool()}, key=lambda V: V.descriptor)
    for V in Vs:
        F = V.field
        centers = list(DEFAULT_GRID.elements(F))
        if isinstance(V, _LimitValuation):
            centers += V.gen.elements(6)
        for _ in range(samples):
            f = random_poly(F, rng, 3, 2)
            a = rng.choice(centers)
            derivs = [hasse_derivative(f, i) for i in range(1, f.degree + 1)]
            if any(F.val(d.eval(a)) != V(d) for d in derivs):
                rep.skipped += 1
                continue
            va = V(Poly.linear(F, a))
            vfa = F.val(f.eval(a))
            m = min(V(d) + i * va for i, d in enumerate(derivs, 1) if not d.is_zero())
            eps = epsilon(V, f).epsilon
            lab = {"val": V.descriptor, "f": str(f), "a": F.format_elem(a)}
            if vfa < m:
                rep.check(V(f) == vfa and eps < va, law="dominant f(a): eps(f) < v(x-a)", **lab)
            elif V(f) == min(vfa, m):
                rep.check(eps <= va, law="eps(f) <= v(x-a)", **lab)
            else:
                rep.skipped += 1
    return rep


SUITES: dict[str, Callable[[int, int], SuiteReport]] = {
    "lemma-2-3": suite_lemma_2_3,
    "prop-powers-of-p": suite_powers_of_p,
    "prop-truncation-valuation": suite_truncation_valuation,
    "prop-dificil": suite_dificil,
    "prop-comp": suite_comp,
    "lemma-psi": suite_lemma_psi,
    "thm-key-characterization": suite_key_characterization,
    "thm-1-1": suite_thm_1_1,
    "thm-1-2": suite_thm_1_2,
    "cor-truncation-agreement": suite_cor_truncation,
    "lemma-8": suite_lemma_8,
    "remark-ii": suite_remark_ii,
    "truncation-counterexample": suite_truncation_counterexample,
}


def run_suite(name: str, seed: int = 0, samples: int = 20) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}, all")
    t0 = time.perf_counter()
    rep = SUITES[name](seed, samples)
    rep.seconds = time.perf_counter() - t0
    return rep


def run_all(seed: int = 0, samples: int = 20) -> list[SuiteReport]:
    return [run_suite(name, seed, samples) for name in sorted(SUITES)]
