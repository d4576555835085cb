"""Valuations on K[x].

Four constructive representations are provided:

* ``GaussValuation`` -- monomial valuation with a fixed value for x;
* ``AugmentedValuation`` -- [mu; mu'(Q) = gamma] over a predecessor;
* ``RootValuation`` -- f -> v(f(z)) for a simple p-adic root z of g, with
  v(f) = INF exactly when g divides f;
* ``SeriesValuation`` -- f -> v(f(z)) for the limit z of a series generator.

The two limit-backed variants evaluate f along the approximating sequence and
stop at the first index where a Taylor-remainder bound certifies the value.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from .errors import BudgetExhausted, Unsupported
from .fields import PAdicField, ValuedField, parse_field
from .pcs import DEFAULT_CAP, HenselGenerator, PcsGenerator, SeriesGenerator, parse_generator
from .poly import Poly, hasse_derivative, poly_divmod, q_expansion
from .values import INF, ExtValue, format_value, parse_value

__all__ = [
    "XValuation",
    "GaussValuation",
    "AugmentedValuation",
    "RootValuation",
    "SeriesValuation",
    "xval_eval",
    "validate",
    "chain_describe",
    "parse_valuation",
]


MEMO_LIMIT = 200_000


class XValuation:
    """Base class; evaluations are memoised per instance (results are deterministic)."""

    field: ValuedField

    def __call__(self, f: Poly) -> ExtValue:
        if f.field != self.field:
            raise ValueError(f"{f} is over {f.field}, valuation is over {self.field}")
        if f.is_zero():
            return INF
        memo = self.__dict__.setdefault("_memo", {})
        v = memo.get(f)
        if v is None:
            v = self._eval(f)
            if len(memo) < MEMO_LIMIT:
                memo[f] = v
        return v

    def _eval(self, f: Poly) -> ExtValue:
        raise NotImplementedError

    def const_val(self, c) -> ExtValue:
        return self.field.val(c)

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.descriptor

    def __repr__(self):
        return f"<{self.descriptor}>"

    def __eq__(self, other):
        return isinstance(other, XValuation) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(self.descriptor)


class GaussValuation(XValuation):
    """v(sum a_i x^i) = min_i v(a_i) + i * gamma_x."""

    kind = "gauss"

    def __init__(self, field: ValuedField, gamma_x):
        self.field = field
        self.gamma_x = Fraction(gamma_x)

    def _eval(self, f: Poly) -> ExtValue:
        val = self.field.val
        return min(val(c) + i * self.gamma_x for i, c in enumerate(f.coeffs) if c)

    @property
    def descriptor(self) -> str:
        return f"gauss:{self.field.descriptor}:{format_value(self.gamma_x)}"


class AugmentedValuation(XValuation):
    """[pred; v(Q) = gamma]: v(f) = min_i pred(f_i) + i * gamma over the Q-expansion."""

    kind = "aug"

    def __init__(self, pred: XValuation, Q: Poly, gamma):
        if Q.field != pred.field:
            raise ValueError("augmentation key over a different field")
        if not Q.is_monic() or Q.degree < 1:
            raise ValueError(f"augmentation key must be monic of degree >= 1, got {Q}")
        self.field = pred.field
        self.pred = pred
        self.Q = Q
        self.gamma = parse_value(gamma) if isinstance(gamma, str) else Fraction(gamma)

    def _eval(self, f: Poly) -> ExtValue:
        best = INF
        for i, fi in enumerate(q_expansion(f, self.Q)):
            if fi.is_zero():
                continue
            v = self.pred(fi) + i * self.gamma
            if v < best:
                best = v
        return best

    @property
    def descriptor(self) -> str:
        return f"aug:({self.pred.descriptor});Q={self.Q};g={format_value(self.gamma)}"


class _LimitValuation(XValuation):
    """Shared evaluation along an approximating sequence a_rho -> z."""

    gen: PcsGenerator

    def __init__(self):
        self._cache: dict = {}
        self._lock = threading.Lock()

    def _divides(self, f: Poly) -> bool:
        return False

    def _eval(self, f: Poly) -> ExtValue:
        with self._lock:
            hit = self._cache.get(f)
        if hit is not None:
            return hit
        v = self._compute(f)
        with self._lock:
            self._cache[f] = v
        return v

    def _compute(self, f: Poly) -> ExtValue:
        if f.is_constant():
            return self.field.val(f.lc)
        if self._divides(f):
            return INF
        val = self.field.val
        derivs = [hasse_derivative(f, i) for i in range(1, f.degree + 1)]
        for rho in range(self.gen.cap + 1):
            a = self.gen.element(rho)
            dist = self.gen.limit_distance(rho)
            v0 = val(f.eval(a))
            bound = min(
                (val(d.eval(a)) + i * dist for i, d in enumerate(derivs, 1) if not d.is_zero()),
                default=INF,
            )
            if v0 < bound:
                return v0
        raise BudgetExhausted(f"value of {f} not certified within {self.gen.cap} steps of {self.gen.descriptor}")

    def value_of_limit_distance(self, rho: int) -> ExtValue:
        return self.gen.limit_distance(rho)


class RootValuation(_LimitValuation):
    """v(f) = v_p(f(z)) for the p-adic root z of g lifted from a0."""

    kind = "root"

    def __init__(self, field: ValuedField, g: Poly, a0, cap: int = DEFAULT_CAP):
        if not isinstance(field, PAdicField):
            raise ValueError("root valuations are only available over qp:<p>")
        super().__init__()
        self.field = field
        self.gen = HenselGenerator(field, g, a0, cap)
        self.g = g
        self.a0 = self.gen.a0

    def _divides(self, f: Poly) -> bool:
        return f.degree >= self.g.degree and poly_divmod(f, self.g)[1].is_zero()

    @property
    def descriptor(self) -> str:
        return f"root:{self.field.descriptor};g={self.g};a0={self.field.format_elem(self.a0)}"


class SeriesValuation(_LimitValuation):
    """v(f) = v(f(z)) for the limit z of a series generator (never INF)."""

    kind = "series"

    def __init__(self, gen: SeriesGenerator):
        super().__init__()
        self.field = gen.field
        self.gen = gen

    @property
    def descriptor(self) -> str:
        return self.gen.descriptor


def xval_eval(V: XValuation, f: Poly) -> ExtValue:
    return V(f)


# ---------------------------------------------------------------------------


def validate(V: XValuation, budget: int = 2) -> list[str]:
    """Construction constraints as a list of violations (empty when well formed)."""
    out: list[str] = []
    if isinstance(V, GaussValuation):
        if V.gamma_x < 0:
            out.append("v(x) >= 0 required")
        return out
    if isinstance(V, AugmentedValuation):
        out.extend(validate(V.pred, budget))
        if V.Q.field != V.pred.field:
            out.append("base-field mismatch in augmentation")
            return out
        before = V.pred(V.Q)
        if not V.gamma > before:
            out.append(
                f"non-increasing augmentation: gamma {format_value(V.gamma)} <= "
                f"pred({V.Q}) = {format_value(before)}"
            )
        elif V.Q.degree > 1:
            from .keypoly import Certified, is_key

            status = is_key(V, V.Q, budget=budget)
            if not isinstance(status, Certified):
                out.append(f"key certificate missing for {V.Q}: {status.summary()}")
        if V(Poly.x(V.field)) < 0:
            out.append("v(x) >= 0 required")
        return out
    if isinstance(V, RootValuation):
        from .poly import Factor, irreducible_bounded

        if isinstance(irreducible_bounded(V.g), Factor):
            out.append(f"{V.g} is reducible")
        return out
    return out


def chain_describe(V: XValuation) -> list[tuple[Poly, ExtValue]]:
    """The augmentation ladder [(x, gamma_x), (Q_1, gamma_1), ...]."""
    if isinstance(V, GaussValuation):
        return [(Poly.x(V.field), V.gamma_x)]
    if isinstance(V, AugmentedValuation):
        return chain_describe(V.pred) + [(V.Q, V.gamma)]
    raise Unsupported(f"{V.kind} valuations have no finite augmentation chain")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_valuation(text: str, cap: int = DEFAULT_CAP) -> XValuation:
    """Parse a valuation descriptor.

    ``gauss:<field>:<gamma>``, ``aug:(<descriptor>);Q=<poly>;g=<value>``,
    ``root:<field>;g=<poly>;a0=<elem>``, ``series:<field>;expr=<rule-id>``.
    """
    s = text.strip()
    kind, _, rest = s.partition(":")
    if kind == "gauss":
        fdesc, _, gamma = rest.rpartition(":")
        if not fdesc:
            raise ValueError(f"bad gauss descriptor {text!r}")
        return GaussValuation(parse_field(fdesc), Fraction(gamma))
    if kind == "aug":
        parts = _split_top(rest, ";")
        inner = parts[0].strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise ValueError(f"aug descriptor needs a parenthesised predecessor: {text!r}")
        pred = parse_valuation(inner[1:-1], cap)
        opts = dict(p.split("=", 1) for p in parts[1:])
        try:
            Q = Poly.parse(pred.field, opts["Q"])
            gamma = Fraction(opts["g"])
        except KeyError as exc:
            raise ValueError(f"aug descriptor needs Q= and g=: {text!r}") from exc
        return AugmentedValuation(pred, Q, gamma)
    if kind == "root":
        gen = parse_generator("hensel:" + rest, cap)
        return RootValuation(gen.field, gen.g, gen.a0, cap)
    if kind == "series":
        return SeriesValuation(parse_generator(s, cap))
    raise ValueError(f"unknown valuation kind {kind!r} in {text!r}")
