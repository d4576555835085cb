"""Key-polynomial calculus for a valuation on K[x].

epsilon(f) = max_b (v(f) - v(d_b f)) / b over the finitely many b with
d_b f != 0; I(f) collects the maximising b and b(f) = min I(f).  A monic Q is
a key polynomial when every f with epsilon(f) >= epsilon(Q) has
deg f >= deg Q.  That condition quantifies over all of K[x], so ``is_key`` is
three-valued: it certifies through linearity, Psi-membership or the limit
conditions (K1)-(K4), falsifies with an explicit witness, or says Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import BudgetExhausted, Indeterminate
from .grid import DEFAULT_GRID, Grid, monic_polys
from .pcs import PcsGenerator, fixed_value
from .poly import Poly, hasse_derivative, q_expansion
from .values import INF, ExtValue, format_value
from .xval import AugmentedValuation, GaussValuation, XValuation, _LimitValuation, chain_describe

__all__ = [
    "EpsilonReport",
    "epsilon",
    "truncate",
    "support_set",
    "Certified",
    "Falsified",
    "UnknownKey",
    "is_key",
    "AlphaPsiReport",
    "alpha_psi",
    "LimitReport",
    "classify_limit",
    "KeyEntry",
    "CompleteSetReport",
    "build_complete_set",
    "DEFAULT_BUDGET",
    "DEFAULT_WINDOW",
]

DEFAULT_BUDGET = 20000
DEFAULT_WINDOW = 8


# ---------------------------------------------------------------------------
# epsilon


@dataclass
class EpsilonReport:
    f: Poly
    value: ExtValue
    epsilon: ExtValue
    I: list[int]
    b: int
    table: list  # (b, v(d_b f), ratio or None)

    def to_dict(self) -> dict:
        return {
            "epsilon": format_value(self.epsilon),
            "I": self.I,
            "b": self.b,
            "value": format_value(self.value),
            "table": [
                {"b": b, "v_db": format_value(vd), "ratio": None if r is None else format_value(r)}
                for b, vd, r in self.table
            ],
        }


def epsilon(V: XValuation, f: Poly) -> EpsilonReport:
    """epsilon(f), I(f) and b(f).

    When v(f) = INF every admissible ratio is INF; I(f) is then taken as the
    limit of the argmax as v(f) grows, i.e. the least b with v(d_b f) finite.
    """
    if f.degree < 1:
        raise ValueError(f"epsilon is undefined for constants ({f})")
    nu = V(f)
    table = []
    for b in range(1, f.degree + 1):
        d = hasse_derivative(f, b)
        if d.is_zero():
            continue
        vd = V(d)
        if vd is INF:
            table.append((b, vd, None))
        elif nu is INF:
            table.append((b, vd, INF))
        else:
            table.append((b, vd, (nu - vd) / b))
    ratios = [r for _, _, r in table if r is not None]
    if not ratios:
        raise ArithmeticError(f"no admissible derivative for {f}")
    eps = max(ratios)
    if eps is INF:
        I = [min(b for b, _, r in table if r is INF)]
    else:
        I = [b for b, _, r in table if r == eps]
    return EpsilonReport(f, nu, eps, I, min(I), table)


def eps_value(V: XValuation, f: Poly) -> ExtValue:
    return epsilon(V, f).epsilon


# ---------------------------------------------------------------------------
# truncations


def _terms(V: XValuation, q: Poly, f: Poly) -> list:
    if not q.is_monic() or q.degree < 1:
        raise ValueError(f"truncation base must be monic of degree >= 1, got {q}")
    parts = q_expansion(f, q)
    vq = V(q) if len(parts) > 1 else None
    out = []
    for i, fi in enumerate(parts):
        if fi.is_zero():
            out.append(INF)
        elif i == 0:
            out.append(V(fi))
        else:
            out.append(V(fi) + i * vq)
    return out


def truncate(V: XValuation, q: Poly, f: Poly) -> ExtValue:
    """v_q(f) = min_i v(f_i q^i) over the q-standard expansion of f."""
    return min(_terms(V, q, f))


def support_set(V: XValuation, q: Poly, f: Poly) -> tuple[list[int], int]:
    """(S_q(f), delta_q(f)): indices attaining v_q(f) and their maximum."""
    terms = _terms(V, q, f)
    m = min(terms)
    S = [i for i, t in enumerate(terms) if t == m]
    return S, max(S)


# ---------------------------------------------------------------------------
# key status


@dataclass
class Certified:
    reason: str  # "Linear" | "PsiMember" | "LimitWitness"
    exact: bool
    q_minus: Optional[Poly] = None
    detail: dict = dc_field(default_factory=dict)

    def summary(self) -> str:
        extra = f" via {self.q_minus}" if self.q_minus is not None else ""
        return f"Certified({self.reason}{extra}; {'exact' if self.exact else 'bounded-scale evidence'})"

    def to_dict(self) -> dict:
        d = {"status": "certified", "reason": self.reason, "exact": self.exact}
        if self.q_minus is not None:
            d["q_minus"] = str(self.q_minus)
        d.update(self.detail)
        return d


@dataclass
class Falsified:
    witness: Poly
    eps_witness: ExtValue
    eps_Q: ExtValue

    def summary(self) -> str:
        return f"Falsified(witness {self.witness}: eps {format_value(self.eps_witness)} >= {format_value(self.eps_Q)})"

    def to_dict(self) -> dict:
        return {
            "status": "falsified",
            "witness": str(self.witness),
            "eps_witness": format_value(self.eps_witness),
            "eps_Q": format_value(self.eps_Q),
        }


@dataclass
class UnknownKey:
    report: str

    def summary(self) -> str:
        return f"Unknown({self.report})"

    def to_dict(self) -> dict:
        return {"status": "unknown", "report": self.report}


def _linear_centers(V: XValuation, grid: Grid, window: int) -> list:
    F = V.field
    centers = dict.fromkeys(grid.elements(F))
    if isinstance(V, (GaussValuation, AugmentedValuation)):
        for Q, _ in chain_describe(V):
            if Q.degree == 1:
                centers.setdefault(-Q.coeffs[0], None)
    if isinstance(V, _LimitValuation):
        for a in V.gen.elements(window):
            centers.setdefault(a, None)
    return list(centers)


def _structured_keys(V: XValuation) -> list[Poly]:
    if isinstance(V, (GaussValuation, AugmentedValuation)):
        return [Q for Q, _ in chain_describe(V)]
    return []


def _lower_candidates(V: XValuation, Q: Poly, grid: Grid, window: int, budget: int) -> Iterable[Poly]:
    """Monic f with 1 <= deg f < deg Q, in canonical enumeration order."""
    F = V.field
    seen = set()
    elems = grid.elements(F)
    for b in range(1, Q.degree):
        d = hasse_derivative(Q, b)
        if d.degree >= 1:
            m = d.monic()
            if m not in seen:
                seen.add(m)
                yield m
    if Q.degree < 2:
        return
    for a in _linear_centers(V, grid, window):
        f = Poly.linear(F, a)
        if f not in seen:
            seen.add(f)
            yield f
    for K in _structured_keys(V):
        if 1 <= K.degree < Q.degree and K not in seen:
            seen.add(K)
            yield K
    count = 0
    for d in range(2, Q.degree):
        if len(elems) ** d > budget:
            break
        for f in monic_polys(F, d, elems):
            count += 1
            if f not in seen:
                seen.add(f)
                yield f


def falsify(V: XValuation, Q: Poly, grid: Grid = DEFAULT_GRID, window: int = DEFAULT_WINDOW,
            budget: int = DEFAULT_BUDGET) -> Optional[Falsified]:
    """First f (canonical order) with deg f < deg Q and epsilon(f) >= epsilon(Q)."""
    if Q.degree <= 1:
        return None
    eQ = eps_value(V, Q)
    for f in _lower_candidates(V, Q, grid, window, budget):
        ef = eps_value(V, f)
        if ef >= eQ:
            return Falsified(f, ef, eQ)
    return None


def is_key(
    V: XValuation,
    Q: Poly,
    budget: int = DEFAULT_BUDGET,
    grid: Grid = DEFAULT_GRID,
    window: int = DEFAULT_WINDOW,
    _depth: int = 0,
):
    """Three-valued key-polynomial test."""
    if not Q.is_monic() or Q.degree < 1:
        raise ValueError(f"key candidates must be monic of degree >= 1, got {Q}")
    if Q.degree == 1:
        return Certified("Linear", exact=True)
    bad = falsify(V, Q, grid, window, budget)
    if bad is not None:
        return bad
    vQ = V(Q)
    # Psi-membership: some key Q_- with v_{Q_-}(Q) < v(Q) and alpha(Q_-) = deg Q
    for Qm in _psi_predecessors(V, Q, grid, window):
        if not truncate(V, Qm, Q) < vQ:
            continue
        if Qm.degree > 1:
            if _depth > 3:
                continue
            st = is_key(V, Qm, budget, grid, window, _depth + 1)
            if not isinstance(st, Certified):
                continue
        if Qm.degree == Q.degree:
            return Certified("PsiMember", exact=True, q_minus=Qm)
        ap = alpha_psi(V, Qm, Q.degree - 1, grid, budget=budget, window=window)
        if ap.alpha is None:
            return Certified(
                "PsiMember",
                exact=False,
                q_minus=Qm,
                detail={"alpha_searched_below": Q.degree, "candidates": ap.searched},
            )
    if isinstance(V, _LimitValuation):
        try:
            lim = classify_limit(V, Q, V.gen, budget=budget, grid=grid, window=window)
        except (Indeterminate, BudgetExhausted) as exc:
            return UnknownKey(f"limit check inconclusive: {exc}")
        if lim.overall:
            return Certified("LimitWitness", exact=False, q_minus=lim.q_minus, detail=lim.to_dict())
    return UnknownKey(f"no certificate and no falsifier with grid {grid.spec()} and budget {budget}")


def _psi_predecessors(V: XValuation, Q: Poly, grid: Grid, window: int) -> list[Poly]:
    """Candidate Q_- of degree <= deg Q: equal degree first, then by (deg, v) descending."""
    F = V.field
    cands = dict.fromkeys(Poly.linear(F, a) for a in _linear_centers(V, grid, window))
    for K in _structured_keys(V):
        if K.degree <= Q.degree and K != Q:
            cands.setdefault(K, None)
    cands.pop(Q, None)
    scored = [(K.degree, V(K), K) for K in cands]
    scored.sort(key=lambda t: (-t[0], _neg(t[1]), t[2].sort_key()))
    return [K for _, _, K in scored]


def _neg(v):
    # sort key placing larger values first
    return (0, 0) if v is INF else (1, -v)


# ---------------------------------------------------------------------------
# alpha and Psi


@dataclass
class AlphaPsiReport:
    Q: Poly
    alpha: Optional[int]
    psi_samples: list[Poly]
    searched: int
    degree_bound: int
    grid: Grid

    def to_dict(self) -> dict:
        return {
            "Q": str(self.Q),
            "alpha": "NOT_FOUND" if self.alpha is None else self.alpha,
            "psi_samples": [str(f) for f in self.psi_samples],
            "searched": self.searched,
            "degree_bound": self.degree_bound,
            "grid": self.grid.describe(),
        }


def _degree_candidates(V: XValuation, Q: Poly, d: int, grid: Grid, window: int, budget: int):
    F = V.field
    elems = grid.elements(F)
    seen = set()

    def emit(f):
        if f.degree == d and f.is_monic() and f not in seen:
            seen.add(f)
            return True
        return False

    if d == 1:
        for a in _linear_centers(V, grid, window):
            f = Poly.linear(F, a)
            if emit(f):
                yield f
        if isinstance(V, _LimitValuation) and Q.degree == 1:
            # walk the sequence until it is provably closer to the limit than Q
            vQ = V(Q)
            for rho in range(V.gen.cap):
                f = Poly.linear(F, V.gen.element(rho))
                if emit(f):
                    yield f
                if vQ is INF or V.gen.limit_distance(rho) > vQ:
                    break
    if d == Q.degree:
        # Q + h with h over the grid, deg h < deg Q
        for h in _small_polys(F, Q.degree - 1, elems, budget):
            f = Q + h
            if emit(f):
                yield f
    for K in _structured_keys(V):
        if emit(K):
            yield K
    keys = [Q] + [K for K in _structured_keys(V) if K.degree < d]
    for A in keys:
        for B in keys:
            if A.degree + B.degree == d and emit(A * B):
                yield A * B
    if len(elems) ** d <= budget:
        for f in monic_polys(F, d, elems):
            if emit(f):
                yield f


def _small_polys(F, max_deg: int, elems: list, budget: int):
    """Polynomials of degree <= max_deg with grid coefficients (includes 0)."""
    import itertools

    for d in range(0, max_deg + 1):
        if len(elems) ** (d + 1) > budget:
            return
        for cs in itertools.product(elems, repeat=d + 1):
            yield Poly(F, cs)


def alpha_psi(
    V: XValuation,
    Q: Poly,
    degree_bound: int,
    grid: Grid = DEFAULT_GRID,
    budget: int = DEFAULT_BUDGET,
    window: int = DEFAULT_WINDOW,
) -> AlphaPsiReport:
    """Least degree d <= degree_bound with a monic f, v_Q(f) < v(f), found by search.

    Degrees below deg Q never qualify (their Q-expansion has a single term).
    ``alpha`` is ``None`` when the searched region shows v_Q = v.
    """
    searched = 0
    for d in range(Q.degree, degree_bound + 1):
        found = []
        for f in _degree_candidates(V, Q, d, grid, window, budget):
            searched += 1
            if truncate(V, Q, f) < V(f):
                found.append(f)
        if found:
            found.sort(key=lambda f: (_neg(V(f)), f.sort_key()))
            return AlphaPsiReport(Q, d, found, searched, degree_bound, grid)
    return AlphaPsiReport(Q, None, [], searched, degree_bound, grid)


# ---------------------------------------------------------------------------
# limit key polynomials


@dataclass
class LimitReport:
    Q: Poly
    q_minus: Optional[Poly]
    k1: bool
    k2: bool
    k3: bool
    k4: bool
    psi_samples: list[Poly]
    psi_values: list
    notes: dict = dc_field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return self.k1 and self.k2 and self.k3 and self.k4

    def to_dict(self) -> dict:
        return {
            "Q": str(self.Q),
            "q_minus": None if self.q_minus is None else str(self.q_minus),
            "K1": self.k1,
            "K2": self.k2,
            "K2_evidence": "bounded-scale evidence",
            "K3": self.k3,
            "K4": self.k4,
            "overall": self.overall,
            "psi_samples": [str(f) for f in self.psi_samples],
            "psi_values": [format_value(v) for v in self.psi_values],
            **self.notes,
        }


def classify_limit(
    V: XValuation,
    Q: Poly,
    source=None,
    budget: int = DEFAULT_BUDGET,
    grid: Grid = DEFAULT_GRID,
    window: int = DEFAULT_WINDOW,
    degree_bound: Optional[int] = None,
) -> LimitReport:
    """Check (K1)-(K4) for Q at bounded scale.

    ``source`` is a pcs generator whose limit realises V (Q_- = x - a_rho) or
    ``None``/"chain" for Gauss and augmented valuations (Q_- = the last chain
    key of degree < deg Q).
    """
    F = V.field
    if isinstance(source, PcsGenerator):
        return _classify_limit_pcs(V, Q, source, budget, grid, window)
    if not isinstance(V, (GaussValuation, AugmentedValuation)):
        raise ValueError("classify_limit needs a generator for limit-backed valuations")
    lower = [K for K, _ in chain_describe(V) if K.degree < Q.degree] or [Poly.x(F)]
    Qm = lower[-1]
    ap = alpha_psi(V, Qm, Qm.degree, grid, budget=budget, window=window)
    k1 = ap.alpha == Qm.degree
    samples = ap.psi_samples
    values = [V(f) for f in samples]
    k2 = k1 and bool(samples) and _no_sampled_max(values)
    k3 = bool(samples) and all(truncate(V, S, Q) < V(Q) for S in samples)
    k4 = k3 and _k4(V, Q, samples, grid, window, budget) is None
    return LimitReport(Q, Qm, k1, k2, k3, k4, samples, values,
                       {"source": "chain", "K2_reason": "" if k2 else "Psi(Q_-) empty or has a maximum"})


def _no_sampled_max(values: list) -> bool:
    # strictly increasing along the cofinal family and no INF
    return len(values) >= 2 and all(a < b for a, b in zip(values, values[1:])) and values[-1] is not INF


def _k4(V, Q, samples, grid, window, budget):
    """A monic f with deg f < deg Q satisfying (K3), or None."""
    vQ = None
    for f in _lower_candidates(V, Q, grid, window, budget):
        vf = V(f)
        if all(truncate(V, S, f) < vf for S in samples):
            return f
    for s in samples:
        if s.degree < Q.degree:
            vf = V(s)
            if all(truncate(V, S, s) < vf for S in samples):
                return s
    return vQ


def _classify_limit_pcs(V, Q, gen: PcsGenerator, budget, grid, window) -> LimitReport:
    F = V.field
    try:
        rep = fixed_value(gen, Q, window)
        rho = 0 if rep.fixed else rep.start
    except Indeterminate:
        rho = 0
    Qm = Poly.linear(F, gen.element(rho))
    samples = [Poly.linear(F, gen.element(s)) for s in range(rho + 1, rho + 1 + window)]
    vQm = V(Qm)
    # K1: an equal-degree disagreement pins alpha(Q_-) = deg Q_- = 1
    k1 = truncate(V, Qm, samples[0]) < V(samples[0])
    members = [S for S in samples if truncate(V, Qm, S) < V(S)]
    # grid members of Psi(Q_-) must be dominated by the generator family
    grid_members = []
    for a in grid.elements(F):
        f = Poly.linear(F, a)
        if f != Qm and truncate(V, Qm, f) < V(f):
            grid_members.append(f)
    values = [V(S) for S in members]
    k2 = (
        len(members) == len(samples)
        and _no_sampled_max(values)
        and all(V(f) < values[-1] for f in grid_members)
    )
    vQ = V(Q)
    k3 = bool(members) and all(truncate(V, S, Q) < vQ for S in members)
    witness = _k4(V, Q, members, grid, window, budget) if k3 else None
    k4 = k3 and witness is None
    notes = {"source": gen.descriptor, "rho": rho, "window": window, "v_q_minus": format_value(vQm)}
    if witness is not None:
        notes["K4_witness"] = str(witness)
    return LimitReport(Q, Qm, k1, k2, k3, k4, members, values, notes)


# ---------------------------------------------------------------------------
# complete sets


@dataclass
class KeyEntry:
    Q: Poly
    epsilon: ExtValue
    value: ExtValue
    limit: bool = False
    cofinal: bool = False

    def to_dict(self) -> dict:
        return {
            "Q": str(self.Q),
            "epsilon": format_value(self.epsilon),
            "value": format_value(self.value),
            "limit": self.limit,
            "cofinal_family": self.cofinal,
        }


@dataclass
class CompleteSetReport:
    keys: list[KeyEntry]
    witnesses: dict  # corpus poly -> key poly
    uncovered: list[Poly]
    complete: bool
    notes: list[str] = dc_field(default_factory=list)

    @property
    def lambda_(self) -> list[Poly]:
        return [k.Q for k in self.keys]

    def verify(self, V: XValuation) -> bool:
        """Re-check every witness exactly and the ordering by epsilon."""
        for f, Q in self.witnesses.items():
            if truncate(V, Q, f) != V(f):
                return False
        eps = [k.epsilon for k in self.keys]
        return all(a < b for a, b in zip(eps, eps[1:]))

    def to_dict(self) -> dict:
        return {
            "lambda": [k.to_dict() for k in self.keys],
            "witnesses": {str(f): str(Q) for f, Q in self.witnesses.items()},
            "uncovered": [str(f) for f in self.uncovered],
            "complete": self.complete,
            "notes": self.notes,
        }


def build_complete_set(
    V: XValuation,
    degree_bound: int,
    corpus: Iterable[Poly],
    budget: int = DEFAULT_BUDGET,
    grid: Grid = DEFAULT_GRID,
    window: int = DEFAULT_WINDOW,
) -> CompleteSetReport:
    """Greedy ascent through key polynomials until every corpus member is witnessed.

    Linear stage: the x - a maximising v(x - a), or the cofinal family
    x - a_rho when the valuation is a limit with no maximum.  Each further
    stage picks, among minimal-degree augmenting candidates, one of maximal
    value (ties broken by canonical order); after a cofinal family it takes the
    least-degree polynomial that every family member under-truncates and
    certifies it as a limit key polynomial.
    """
    F = V.field
    corpus = list(dict.fromkeys(corpus))
    notes: list[str] = []
    keys: list[KeyEntry] = []

    def entry(Q, limit=False, cofinal=False):
        return KeyEntry(Q, eps_value(V, Q), V(Q), limit, cofinal)

    cofinal = isinstance(V, _LimitValuation) and not _limit_in_base(V)
    if cofinal:
        for rho in range(window):
            keys.append(entry(Poly.linear(F, V.gen.element(rho)), cofinal=True))
        notes.append(f"no maximal v(x-a): cofinal family x-a_rho, rho < {window}")
    else:
        best = min(
            (Poly.linear(F, a) for a in _linear_centers(V, grid, window)),
            key=lambda f: (_neg(V(f)), f.sort_key()),
        )
        keys.append(entry(best))

    def uncovered_now():
        out = []
        for f in corpus:
            vf = V(f)
            if not any(truncate(V, k.Q, f) == vf for k in keys):
                out.append(f)
        return out

    while True:
        todo = uncovered_now()
        if not todo:
            break
        last = keys[-1]
        if last.Q.degree >= degree_bound:
            notes.append(f"degree bound {degree_bound} reached")
            break
        if last.cofinal:
            family = [k.Q for k in keys if k.cofinal]
            nxt = _least_under_truncated(V, family, todo, grid, degree_bound, budget)
            if nxt is None:
                notes.append("no polynomial under-truncated by the whole cofinal family found")
                break
            lim = classify_limit(V, nxt, V.gen, budget=budget, grid=grid, window=window)
            if not lim.overall:
                notes.append(f"limit check failed for {nxt}: {lim.to_dict()}")
                break
            ap = alpha_psi(V, nxt, nxt.degree, grid, budget=budget, window=window)
            if ap.alpha is not None and ap.alpha == nxt.degree:
                nxt = ap.psi_samples[0]
            keys.append(entry(nxt, limit=True))
            continue
        ap = alpha_psi(V, last.Q, degree_bound, grid, budget=budget, window=window)
        if ap.alpha is None:
            notes.append(f"alpha({last.Q}) not found up to degree {degree_bound}")
            break
        nxt = ap.psi_samples[0]
        status = is_key(V, nxt, budget, grid, window)
        if not isinstance(status, Certified):
            notes.append(f"candidate {nxt} not certified: {status.summary()}")
            break
        keys.append(entry(nxt))

    todo = uncovered_now()
    witnesses = {}
    for f in corpus:
        if f in todo:
            continue
        vf = V(f)
        witnesses[f] = next(k.Q for k in keys if truncate(V, k.Q, f) == vf)
    return CompleteSetReport(keys, witnesses, todo, not todo, notes)


def _limit_in_base(V) -> bool:
    from .xval import RootValuation

    return isinstance(V, RootValuation) and V.g.degree == 1


def _least_under_truncated(V, family, todo, grid, degree_bound, budget) -> Optional[Poly]:
    """Least-degree monic f with v_{Q'}(f) < v(f) for every Q' in the family."""
    from .xval import RootValuation

    F = V.field
    cands = {f.monic() for f in todo if f.degree >= 1}
    if isinstance(V, RootValuation):
        cands.add(V.g)
    elems = grid.elements(F)
    for d in range(1, degree_bound + 1):
        pool = sorted((f for f in cands if f.degree == d), key=Poly.sort_key)
        if len(elems) ** d <= budget:
            pool += list(monic_polys(F, d, elems))
        for f in pool:
            vf = V(f)
            if all(truncate(V, S, f) < vf for S in family):
                return f
    return None
