"""Pseudo-convergent sequences at desk scale.

Sequences are produced by generators (index -> element).  Only finite
prefixes of omega-indexed sequences are ever materialised; "sufficiently
large index" is operationalised by windows with a single widening retry, and
every verdict records the window it was reached on.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Optional

from .errors import BudgetExhausted, DegenerateConstant, Indeterminate, NonSimpleRoot, NotFixed
from .fields import PAdicField, ValuedField, parse_field
from .grid import DEFAULT_GRID, Grid, monic_polys
from .poly import Poly, hasse_derivative, irreducible_bounded, Factor
from .values import INF, ExtValue, format_value

__all__ = [
    "PcsGenerator",
    "HenselGenerator",
    "SeriesGenerator",
    "SERIES_RULES",
    "parse_generator",
    "PcsPrefix",
    "PcsCheck",
    "check_pcs",
    "hensel_generator",
    "FixedValueReport",
    "fixed_value",
    "DominantIndexReport",
    "dominant_index",
    "TypeReport",
    "classify_type",
    "is_power_of",
]

DEFAULT_CAP = 64


def is_power_of(n: int, p: int) -> bool:
    if n < 1:
        return False
    if p == 1:
        return n == 1
    while n % p == 0:
        n //= p
    return n == 1


class PcsGenerator:
    """Deterministic index -> element rule with a transparent memo."""

    field: ValuedField
    kind: str

    def __init__(self, field: ValuedField, cap: int = DEFAULT_CAP):
        self.field = field
        self.cap = cap
        self._elems: list = []
        self._lock = threading.Lock()

    def element(self, rho: int):
        if rho < 0:
            raise IndexError(rho)
        with self._lock:
            while len(self._elems) <= rho:
                if len(self._elems) > self.cap:
                    raise BudgetExhausted(f"{self.descriptor}: index {rho} beyond cap {self.cap}")
                self._elems.append(self._make(len(self._elems)))
            return self._elems[rho]

    def elements(self, n: int) -> list:
        return [self.element(i) for i in range(n)]

    def gamma(self, rho: int) -> ExtValue:
        """gamma_rho = v(a_{rho+1} - a_rho)."""
        return self.field.val(self.element(rho + 1) - self.element(rho))

    def gammas(self, n: int) -> list:
        return [self.gamma(i) for i in range(n)]

    def limit_distance(self, rho: int) -> ExtValue:
        """Exact value v(z - a_rho) for the limit z of the sequence."""
        return self.gamma(rho)

    def prefix(self, n: int) -> "PcsPrefix":
        return PcsPrefix(self.field, tuple(self.elements(n)))

    def _make(self, rho: int):
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.descriptor}>"


class HenselGenerator(PcsGenerator):
    """Successive canonical lifts of a simple root of g over Q_p.

    a_{rho+1} is the Newton lift of a_rho reduced into [0, p^k) for the least
    precision k > prec(a_rho) at which it differs from a_rho (k = rho + 2 unless
    a p-adic digit of the root vanishes).
    """

    kind = "hensel"

    def __init__(self, field: ValuedField, g: Poly, a0, cap: int = DEFAULT_CAP):
        if not isinstance(field, PAdicField):
            raise ValueError("Hensel generators are only available over qp:<p>")
        super().__init__(field, cap)
        if g.field != field or not g.is_monic() or g.degree < 1:
            raise ValueError(f"g must be monic over {field}, got {g}")
        if any(field.val(c) < 0 for c in g.coeffs):
            raise ValueError(f"g must have {field.p}-integral coefficients")
        a0 = field.coerce(a0)
        if field.val(a0) < 0:
            raise ValueError("a0 must be p-integral")
        self.g = g
        self.dg = hasse_derivative(g, 1)
        self.a0 = a0
        if field.val(g.eval(a0)) < 1:
            raise ValueError(f"g(a0) = {g.eval(a0)} is not divisible by {field.p}")
        if field.val(self.dg.eval(a0)) != 0:
            raise NonSimpleRoot(f"d1 g(a0) = {self.dg.eval(a0)} is not a unit: non-simple root")
        self._prec: list[int] = []

    @property
    def descriptor(self) -> str:
        return f"hensel:{self.field.descriptor};g={self.g};a0={self.field.format_elem(self.a0)}"

    def _make(self, rho: int):
        p = self.field.p
        if rho == 0:
            self._prec.append(1)
            return self.a0
        prev = self._elems[-1]
        k = self._prec[-1] + 1
        y = prev
        while True:
            if k > self.cap + 1:
                raise BudgetExhausted(f"Hensel precision cap {self.cap} exceeded")
            while self.field.val(self.g.eval(y)) < k:
                y = y - self.g.eval(y) / self.dg.eval(y)
            mod = p**k
            cand = Fraction(y.numerator * pow(y.denominator, -1, mod) % mod)
            if cand != prev:
                self._prec.append(k)
                return cand
            k += 1

    def limit_distance(self, rho: int) -> ExtValue:
        # g integral and d1 g(a_rho) a unit: v(z - a_rho) = v(g(a_rho))
        return self.field.val(self.g.eval(self.element(rho)))


def _geom(i: int) -> int:
    return i


def _geom_squares(i: int) -> int:
    return i * i


SERIES_RULES: dict[str, Callable[[int], int]] = {
    "geom": _geom,
    "geom-squares": _geom_squares,
}


class SeriesGenerator(PcsGenerator):
    """Partial sums a_rho = sum_{i <= rho} pi^{e(i)} with strictly increasing e.

    Rules: ``geom`` (e(i) = i, limit 1/(1 - pi) lies in K) and ``geom-squares``
    (e(i) = i^2, no limit in K).
    """

    kind = "series"

    def __init__(self, field: ValuedField, rule: str, cap: int = DEFAULT_CAP):
        if rule not in SERIES_RULES:
            raise ValueError(f"unknown series rule {rule!r}; known: {sorted(SERIES_RULES)}")
        super().__init__(field, cap)
        self.rule = rule
        self.exponent = SERIES_RULES[rule]
        self._pi = field.uniformizer()

    @property
    def descriptor(self) -> str:
        return f"series:{self.field.descriptor};expr={self.rule}"

    def _make(self, rho: int):
        term = self._pi ** self.exponent(rho)
        return term if rho == 0 else self._elems[-1] + term

    def limit_distance(self, rho: int) -> ExtValue:
        return Fraction(self.exponent(rho + 1))


def hensel_generator(field: ValuedField, g: Poly, a0, cap: int = DEFAULT_CAP) -> HenselGenerator:
    return HenselGenerator(field, g, a0, cap)


def parse_generator(text: str, cap: int = DEFAULT_CAP) -> PcsGenerator:
    """``hensel:<field>;g=<poly>;a0=<elem>`` or ``series:<field>;expr=<rule-id>``."""
    kind, _, rest = text.strip().partition(":")
    parts = rest.split(";")
    fld = parse_field(parts[0])
    opts = {}
    for part in parts[1:]:
        key, eq, val = part.partition("=")
        if not eq:
            raise ValueError(f"bad generator option {part!r} in {text!r}")
        opts[key.strip()] = val.strip()
    if kind == "hensel":
        try:
            g = Poly.parse(fld, opts["g"])
            a0 = fld.parse_elem(opts["a0"])
        except KeyError as exc:
            raise ValueError(f"hensel generator needs g= and a0=: {text!r}") from exc
        return HenselGenerator(fld, g, a0, cap)
    if kind == "series":
        if "expr" not in opts:
            raise ValueError(f"series generator needs expr=: {text!r}")
        return SeriesGenerator(fld, opts["expr"], cap)
    raise ValueError(f"unknown generator kind {kind!r} in {text!r}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PcsPrefix:
    field: ValuedField
    elements: tuple

    @property
    def gammas(self) -> list:
        v = self.field.val
        return [v(self.elements[i + 1] - self.elements[i]) for i in range(len(self.elements) - 1)]


@dataclass(frozen=True)
class PcsCheck:
    ok: bool
    gammas: tuple
    violation: Optional[tuple[int, int, int]] = None


def check_pcs(prefix: PcsPrefix) -> PcsCheck:
    """Exhaustive triple check v(a_s - a_r) < v(a_t - a_s) for r < s < t."""
    a = prefix.elements
    v = prefix.field.val
    n = len(a)
    diff = {(i, j): v(a[j] - a[i]) for i in range(n) for j in range(i + 1, n)}
    for r in range(n):
        for s in range(r + 1, n):
            for t in range(s + 1, n):
                if not diff[(r, s)] < diff[(s, t)]:
                    return PcsCheck(False, tuple(prefix.gammas), (r, s, t))
    return PcsCheck(True, tuple(prefix.gammas))


# ---------------------------------------------------------------------------


@dataclass
class FixedValueReport:
    status: str  # "fixed" | "increasing"
    values: list
    gammas: list
    window: int
    value: ExtValue | None = None
    rho_f: int | None = None
    start: int | None = None

    @property
    def fixed(self) -> bool:
        return self.status == "fixed"

    def to_dict(self) -> dict:
        d = {
            "status": self.status,
            "window": self.window,
            "values": [format_value(x) for x in self.values],
            "gammas": [format_value(x) for x in self.gammas],
        }
        if self.fixed:
            d["value"] = format_value(self.value)
            d["rho_f"] = self.rho_f
        else:
            d["increasing_from"] = self.start
        return d


def _classify(values: list, gammas: list, min_increasing: int):
    n = len(values)
    j = n - 1
    while j > 0 and values[j - 1] == values[j]:
        j -= 1
    while j < n and not values[j] < gammas[j]:
        j += 1
    if n - j >= 2 and values[-1] is not INF and all(values[k] < gammas[k] for k in range(j, n)):
        return "fixed", j
    j = n - 1
    while j > 0 and values[j - 1] is not INF and values[j - 1] < values[j]:
        j -= 1
    if n - j >= min_increasing and values[-1] is not INF:
        return "increasing", j
    return None, None


def fixed_value(gen: PcsGenerator, f: Poly, window: int = 6) -> FixedValueReport:
    """Decide whether the sequence fixes the value of f.

    Fixed: the tail of v(f(a_rho)) is constant over at least two consecutive
    indices, strictly below gamma_rho there.  Increasing: the tail is strictly
    increasing over at least max(3, n//2 + 1) indices.  The window is doubled
    once before giving up with ``Indeterminate``.
    """
    if window < 3:
        raise ValueError("window must be at least 3")
    val = gen.field.val
    for w in (window, 2 * window):
        values = [val(f.eval(gen.element(r))) for r in range(w)]
        gammas = gen.gammas(w)
        status, idx = _classify(values, gammas, max(3, w // 2 + 1))
        if status == "fixed":
            return FixedValueReport("fixed", values, gammas, w, value=values[idx], rho_f=idx)
        if status == "increasing":
            return FixedValueReport("increasing", values, gammas, w, start=idx)
    raise Indeterminate(
        f"value of {f} along {gen.descriptor} neither fixed nor increasing within window {2 * window}",
        FixedValueReport("indeterminate", values, gammas, 2 * window),
    )


# ---------------------------------------------------------------------------


@dataclass
class DominantIndexReport:
    h: int
    beta: dict  # i -> beta_i (INF when d_i f = 0)
    tail: list
    gammas: list
    predicted: list  # beta_h + h * gamma_rho on the tail
    observed_values: list  # v(f(a_rho)) on the tail
    observed_differences: list  # v(f(a_{rho+1}) - f(a_rho)) on the tail
    f_fixed: bool
    power_of_p: bool
    window: int

    @property
    def difference_prediction_holds(self) -> bool:
        return self.predicted == self.observed_differences

    @property
    def value_prediction_holds(self) -> bool:
        return self.predicted == self.observed_values

    @property
    def consistent(self) -> bool:
        """The lemma's claims: h a power of p, difference law, and (unfixed f) value law."""
        ok = self.power_of_p and self.difference_prediction_holds
        if not self.f_fixed:
            ok = ok and self.value_prediction_holds
        return ok

    def to_dict(self) -> dict:
        fv = lambda xs: [format_value(x) for x in xs]  # noqa: E731
        return {
            "h": self.h,
            "beta": {str(i): format_value(b) for i, b in sorted(self.beta.items())},
            "tail": self.tail,
            "predicted": fv(self.predicted),
            "observed_values": fv(self.observed_values),
            "observed_differences": fv(self.observed_differences),
            "f_fixed": self.f_fixed,
            "h_power_of_p": self.power_of_p,
            "difference_prediction_holds": self.difference_prediction_holds,
            "value_prediction_holds": self.value_prediction_holds,
            "window": self.window,
        }


def dominant_index(gen: PcsGenerator, f: Poly, window: int = 6) -> DominantIndexReport:
    """Locate h with beta_h + h*gamma_rho the strict minimum on the tail.

    beta_i is the fixed value of the i-th formal derivative.  Besides h, the
    report compares the prediction beta_h + h*gamma_rho with both
    v(f(a_{rho+1}) - f(a_rho)) and v(f(a_rho)); the latter agrees exactly when
    f itself is not fixed.
    """
    if f.degree < 1:
        raise DegenerateConstant(f"{f} is constant; its value {format_value(gen.field.val(f.lc))} is fixed")
    beta: dict[int, ExtValue] = {}
    starts = []
    w = window
    for i in range(1, f.degree + 1):
        d = hasse_derivative(f, i)
        if d.is_zero():
            beta[i] = INF
            continue
        rep = fixed_value(gen, d, window)
        if not rep.fixed:
            raise NotFixed(f"d_{i} f = {d} is not fixed by {gen.descriptor}")
        beta[i] = rep.value
        starts.append(rep.rho_f)
        w = max(w, rep.window)
    try:
        f_rep = fixed_value(gen, f, window)
        f_fixed = f_rep.fixed
        w = max(w, f_rep.window)
    except Indeterminate:
        f_fixed = False
    start = max(starts, default=0)
    gammas = gen.gammas(w)
    finite = [i for i, b in beta.items() if b is not INF]

    def argmin(rho):
        terms = {i: beta[i] + i * gammas[rho] for i in finite}
        m = min(terms.values())
        winners = [i for i, t in terms.items() if t == m]
        return winners[0] if len(winners) == 1 else None

    hs = [argmin(r) for r in range(start, w)]
    # maximal suffix with one unique argmin
    k = len(hs) - 1
    if hs[k] is None:
        raise Indeterminate(f"no unique dominant index at the end of window {w}")
    while k > 0 and hs[k - 1] == hs[-1]:
        k -= 1
    h = hs[-1]
    tail = list(range(start + k, w))
    val = gen.field.val
    predicted = [beta[h] + h * gammas[r] for r in tail]
    obs_vals = [val(f.eval(gen.element(r))) for r in tail]
    obs_diffs = [val(f.eval(gen.element(r + 1)) - f.eval(gen.element(r))) for r in tail]
    return DominantIndexReport(
        h=h,
        beta=beta,
        tail=tail,
        gammas=[gammas[r] for r in tail],
        predicted=predicted,
        observed_values=obs_vals,
        observed_differences=obs_diffs,
        f_fixed=f_fixed,
        power_of_p=is_power_of(h, gen.field.exponent_characteristic),
        window=w,
    )


# ---------------------------------------------------------------------------


@dataclass
class TypeReport:
    kind: str  # "algebraic" | "transcendental-up-to"
    degree_bound: int
    window: int
    q_min: Poly | None = None
    checked: int = 0
    fixed_reports: dict = dc_field(default_factory=dict, repr=False)

    @property
    def algebraic(self) -> bool:
        return self.kind == "algebraic"

    def to_dict(self) -> dict:
        d = {"type": "algebraic" if self.algebraic else "transcendental-up-to",
             "degree_bound": self.degree_bound, "window": self.window, "checked": self.checked}
        if self.algebraic:
            d["q_min"] = str(self.q_min)
        else:
            d["up_to_degree"] = self.degree_bound
        return d


def classify_type(
    gen: PcsGenerator,
    degree_bound: int,
    window: int = 6,
    grid: Grid = DEFAULT_GRID,
) -> TypeReport:
    """Algebraic(q_min) or TranscendentalUpTo(degree_bound), from a grid sweep.

    For Hensel generators q_min is g itself once every lower-degree grid
    polynomial is confirmed fixed and g confirmed unfixed.  Transcendental
    type is only ever claimed up to the degree bound.
    """
    F = gen.field
    elems = grid.elements(F)
    checked = 0
    top = degree_bound
    if isinstance(gen, HenselGenerator):
        if isinstance(irreducible_bounded(gen.g), Factor):
            raise ValueError(f"{gen.g} is reducible; use an irreducible minimal polynomial")
        top = min(degree_bound, gen.g.degree - 1)
    for d in range(1, top + 1):
        for f in monic_polys(F, d, elems):
            rep = fixed_value(gen, f, window)
            checked += 1
            if not rep.fixed:
                if isinstance(gen, HenselGenerator):
                    raise AssertionError(f"{f} of degree < deg g is not fixed along {gen.descriptor}")
                return TypeReport("algebraic", degree_bound, window, q_min=f, checked=checked)
    if isinstance(gen, HenselGenerator) and gen.g.degree <= degree_bound:
        rep = fixed_value(gen, gen.g, window)
        checked += 1
        if rep.fixed:
            raise AssertionError(f"{gen.g} should not be fixed along its own Hensel sequence")
        return TypeReport("algebraic", degree_bound, window, q_min=gen.g, checked=checked)
    return TypeReport("transcendental-up-to", degree_bound, window, checked=checked)
