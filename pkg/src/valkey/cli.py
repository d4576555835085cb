"""Command-line interface: ``valkey <command> [options]``.

Exit codes: 0 success, 1 property violation or falsified key, 2 input error,
3 budget exhausted / unknown / indeterminate.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Optional

from .errors import (
    BudgetExhausted,
    DegenerateConstant,
    Indeterminate,
    LimitInK,
    NonSimpleRoot,
    NotFixed,
    Unsupported,
)
from .fields import parse_field
from .grid import DEFAULT_GRID, Grid
from .keypoly import (
    DEFAULT_BUDGET,
    Certified,
    Falsified,
    alpha_psi,
    build_complete_set,
    epsilon,
    is_key,
    support_set,
    truncate,
)
from .limits import limit_valuation, verify_theorem_1_2, verify_truncation_agreement
from .parsing import ParseError
from .pcs import DEFAULT_CAP, PcsPrefix, check_pcs, classify_type, dominant_index, fixed_value, parse_generator
from .poly import Poly, q_expansion, taylor_expansion
from .report import dumps, make_report, render_text
from .values import format_value
from .xval import chain_describe, parse_valuation, validate

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class Outcome:
    def __init__(self, report: dict, code: int = EXIT_OK):
        self.report = report
        self.code = code


# ---------------------------------------------------------------------------
# helpers


def _grid(args) -> Grid:
    return Grid.parse(args.grid) if args.grid else DEFAULT_GRID


def _val(args):
    if not args.val:
        raise ValueError("--val is required")
    return parse_valuation(args.val, args.cap)


def _field(args):
    if getattr(args, "val", None):
        return _val(args).field
    if getattr(args, "field", None):
        return parse_field(args.field)
    raise ValueError("give --val or --field to fix the base field")


def _poly(F, text: Optional[str], flag: str) -> Poly:
    if text is None:
        raise ValueError(f"{flag} is required")
    return Poly.parse(F, text)


def _report(args, operation, inputs, result, certificates=None, grid=False, budget=False):
    return make_report(
        operation,
        inputs,
        result,
        certificates,
        grid=_grid(args) if grid else None,
        budget=args.budget if budget else None,
        seed=args.seed,
    )


# ---------------------------------------------------------------------------
# commands


def cmd_eps(args) -> Outcome:
    V = _val(args)
    f = _poly(V.field, args.poly, "--poly")
    rep = epsilon(V, f)
    d = rep.to_dict()
    result = {"epsilon": d["epsilon"], "I": d["I"], "b": d["b"]}
    return Outcome(_report(args, "epsilon", {"val": V.descriptor, "poly": str(f)}, result,
                           {"value": d["value"], "table": d["table"]}))


def cmd_truncate(args) -> Outcome:
    V = _val(args)
    q = _poly(V.field, args.q, "--q")
    f = _poly(V.field, args.poly, "--poly")
    parts = q_expansion(f, q)
    result = {"truncation": format_value(truncate(V, q, f)), "value": format_value(V(f))}
    return Outcome(_report(args, "truncate", {"val": V.descriptor, "q": str(q), "poly": str(f)}, result,
                           {"expansion": [str(p) for p in parts]}))


def cmd_expand(args) -> Outcome:
    F = _field(args)
    f = _poly(F, args.poly, "--poly")
    if args.at is not None:
        a = F.parse_elem(args.at)
        coeffs = taylor_expansion(f, a)
        result = {"taylor": [F.format_elem(c) for c in coeffs]}
        inputs = {"field": F.descriptor, "poly": str(f), "at": F.format_elem(a)}
    else:
        q = _poly(F, args.q, "--q")
        result = {"expansion": [str(p) for p in q_expansion(f, q)]}
        inputs = {"field": F.descriptor, "poly": str(f), "q": str(q)}
    return Outcome(_report(args, "expand", inputs, result))


def cmd_support(args) -> Outcome:
    V = _val(args)
    q = _poly(V.field, args.q, "--q")
    f = _poly(V.field, args.poly, "--poly")
    S, delta = support_set(V, q, f)
    return Outcome(_report(args, "support", {"val": V.descriptor, "q": str(q), "poly": str(f)},
                           {"S": S, "delta": delta}))


def cmd_check_key(args) -> Outcome:
    V = _val(args)
    Q = _poly(V.field, args.poly or args.q, "--poly")
    st = is_key(V, Q, budget=args.budget, grid=_grid(args), window=args.window)
    code = EXIT_OK if isinstance(st, Certified) else EXIT_VIOLATION if isinstance(st, Falsified) else EXIT_BUDGET
    eps = epsilon(V, Q)
    return Outcome(_report(args, "check-key", {"val": V.descriptor, "Q": str(Q)}, st.to_dict(),
                           {"epsilon": format_value(eps.epsilon), "I": eps.I, "summary": st.summary()},
                           grid=True, budget=True), code)


def cmd_alpha_psi(args) -> Outcome:
    V = _val(args)
    Q = _poly(V.field, args.q or args.poly, "--q")
    ap = alpha_psi(V, Q, args.degree_bound, _grid(args), budget=args.budget, window=args.window)
    d = ap.to_dict()
    result = {"alpha": d["alpha"], "psi_samples": d["psi_samples"]}
    return Outcome(_report(args, "alpha-psi", {"val": V.descriptor, "Q": str(Q), "degree_bound": args.degree_bound},
                           result, {"searched": ap.searched}, grid=True, budget=True))


def cmd_chain(args) -> Outcome:
    V = _val(args)
    ladder = chain_describe(V)
    violations = validate(V)
    result = {"chain": [{"Q": str(Q), "gamma": format_value(g)} for Q, g in ladder]}
    return Outcome(_report(args, "chain", {"val": V.descriptor}, result, {"violations": violations}),
                   EXIT_VIOLATION if violations else EXIT_OK)


def _gen(args):
    if not args.gen:
        raise ValueError("--gen is required")
    return parse_generator(args.gen, args.cap)


def _figure_ladder(args, gen, values=None, label="v(f(a_rho))"):
    if args.figure:
        from .plotting import save_ladder

        save_ladder(args.figure, gen.gammas(len(values) if values is not None else args.window), values,
                    title=gen.descriptor, label=label)


def cmd_pcs_check(args) -> Outcome:
    if args.elements:
        F = parse_field(args.field) if args.field else _gen(args).field
        elems = tuple(F.parse_elem(s) for s in args.elements.split(","))
        source = {"field": F.descriptor, "elements": [F.format_elem(a) for a in elems]}
    else:
        gen = _gen(args)
        F = gen.field
        elems = tuple(gen.elements(args.window))
        source = {"gen": gen.descriptor, "window": args.window}
    chk = check_pcs(PcsPrefix(F, elems))
    result = {"ok": chk.ok, "gammas": [format_value(g) for g in chk.gammas],
              "violation": list(chk.violation) if chk.violation else None}
    if args.figure:
        from .plotting import save_ladder

        save_ladder(args.figure, chk.gammas, title="pseudo-convergence ladder")
    return Outcome(_report(args, "pcs-check", source, result,
                           {"elements": [F.format_elem(a) for a in elems]}),
                   EXIT_OK if chk.ok else EXIT_VIOLATION)


def cmd_pcs_fixed(args) -> Outcome:
    gen = _gen(args)
    f = _poly(gen.field, args.poly, "--poly")
    rep = fixed_value(gen, f, args.window)
    _figure_ladder(args, gen, rep.values)
    return Outcome(_report(args, "pcs-fixed", {"gen": gen.descriptor, "poly": str(f), "window": args.window},
                           rep.to_dict()))


def cmd_pcs_dominant(args) -> Outcome:
    gen = _gen(args)
    f = _poly(gen.field, args.poly, "--poly")
    rep = dominant_index(gen, f, args.window)
    if args.figure:
        from .plotting import save_ladder

        save_ladder(args.figure, rep.gammas, rep.observed_differences, title=f"{gen.descriptor} | {f}",
                    label="v(f(a_rho+1) - f(a_rho))")
    return Outcome(_report(args, "pcs-dominant", {"gen": gen.descriptor, "poly": str(f), "window": args.window},
                           rep.to_dict()), EXIT_OK if rep.consistent else EXIT_VIOLATION)


def cmd_pcs_classify(args) -> Outcome:
    gen = _gen(args)
    tr = classify_type(gen, args.degree_bound, args.window, _grid(args))
    full = tr.to_dict()
    result = {"type": full["type"]}
    if tr.algebraic:
        result["q_min"] = full["q_min"]
    else:
        result["up_to_degree"] = tr.degree_bound
    _figure_ladder(args, gen)
    return Outcome(_report(args, "pcs-classify",
                           {"gen": gen.descriptor, "degree_bound": args.degree_bound, "window": args.window},
                           result, full, grid=True))


def cmd_pcs_agree(args) -> Outcome:
    gen = _gen(args)
    V = limit_valuation(gen)
    f = _poly(gen.field, args.poly, "--poly")
    rep = verify_truncation_agreement(V, gen, f, args.window)
    _figure_ladder(args, gen, rep.truncations, label="v_rho(f)")
    return Outcome(_report(args, "pcs-agree", {"gen": gen.descriptor, "poly": str(f), "window": args.window},
                           rep.to_dict()), EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_pcs_theorem(args) -> Outcome:
    gen = _gen(args)
    rep = verify_theorem_1_2(gen, args.degree_bound, args.window, _grid(args), budget=args.budget)
    _figure_ladder(args, gen)
    return Outcome(_report(args, "pcs-theorem",
                           {"gen": gen.descriptor, "degree_bound": args.degree_bound, "window": args.window},
                           rep.to_dict(), grid=True, budget=True), EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_complete_set(args) -> Outcome:
    from .suites import complete_set_corpus

    V = _val(args)
    F = V.field
    if args.corpus:
        corpus = [Poly.parse(F, s) for s in args.corpus.split(";") if s.strip()]
    else:
        corpus = complete_set_corpus(V, args.degree_bound, "0,1,-1,2,-2@0..1")
    rep = build_complete_set(V, args.degree_bound, corpus, budget=args.budget, grid=_grid(args), window=args.window)
    if args.figure:
        from .plotting import save_levels

        save_levels(args.figure, [str(k.Q) for k in rep.keys], [k.epsilon for k in rep.keys],
                    [k.value for k in rep.keys], title=V.descriptor)
    d = rep.to_dict()
    result = {"lambda": [k["Q"] for k in d["lambda"]],
              "limit": [k["Q"] for k in d["lambda"] if k["limit"]],
              "complete": d["complete"], "verified": rep.verify(V)}
    code = EXIT_OK if rep.complete and result["verified"] else EXIT_BUDGET
    return Outcome(_report(args, "complete-set",
                           {"val": V.descriptor, "degree_bound": args.degree_bound, "corpus_size": len(corpus)},
                           result, d, grid=True, budget=True), code)


def cmd_verify(args) -> Outcome:
    from .suites import SUITES, run_all, run_suite

    name = args.suite
    if name != "all" and name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}, all")
    reports = run_all(args.seed, args.samples) if name == "all" else [run_suite(name, args.seed, args.samples)]
    if name == "all":
        ok = all(r.passed for r in reports)
    else:
        ok = not reports[0].violated
    result = {"passed": ok, "suites": [r.to_dict() for r in reports]}
    return Outcome(_report(args, "verify", {"suite": name, "samples": args.samples}, result),
                   EXIT_OK if ok else EXIT_VIOLATION)


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--val", help="valuation descriptor, e.g. gauss:qp:3:1")
    p.add_argument("--field", help="field descriptor qp:<p> or fpt:<p>")
    p.add_argument("--poly", help="polynomial in x")
    p.add_argument("--q", help="expansion / truncation polynomial")
    p.add_argument("--gen", help="generator descriptor, e.g. hensel:qp:7;g=x^2-2;a0=3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--window", type=int, default=6)
    p.add_argument("--degree-bound", type=int, default=2)
    p.add_argument("--grid", help="coefficient grid, e.g. 0,1,-1,2,-2@-2..3")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="precision cap for limit valuations")
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--figure", help="write a matplotlib figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="valkey", description="Key polynomials and pseudo-convergent sequences.")
    sub = parser.add_subparsers(dest="command", required=True)
    simple: dict[str, Callable] = {
        "eps": cmd_eps,
        "truncate": cmd_truncate,
        "support": cmd_support,
        "check-key": cmd_check_key,
        "alpha-psi": cmd_alpha_psi,
        "chain": cmd_chain,
    }
    for name, fn in simple.items():
        p = sub.add_parser(name)
        _common(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("expand")
    _common(p)
    p.add_argument("--at", help="Taylor centre (instead of --q)")
    p.set_defaults(func=cmd_expand)
    p = sub.add_parser("complete-set")
    _common(p)
    p.add_argument("--corpus", help="semicolon-separated polynomials (default: small grid corpus)")
    p.set_defaults(func=cmd_complete_set)
    p = sub.add_parser("verify")
    _common(p)
    p.add_argument("--suite", required=True)
    p.set_defaults(func=cmd_verify)
    pcs = sub.add_parser("pcs").add_subparsers(dest="pcs_command", required=True)
    for name, fn in {
        "check": cmd_pcs_check,
        "fixed": cmd_pcs_fixed,
        "dominant": cmd_pcs_dominant,
        "classify": cmd_pcs_classify,
        "agree": cmd_pcs_agree,
        "theorem": cmd_pcs_theorem,
    }.items():
        p = pcs.add_parser(name)
        _common(p)
        if name == "check":
            p.add_argument("--elements", help="explicit comma-separated prefix (with --field)")
        p.set_defaults(func=fn)
    return parser


def _error_report(args, kind: str, message: str, extra: Optional[dict] = None) -> dict:
    result = {"status": kind, "message": message}
    if extra:
        result.update(extra)
    op = args.command if args.command != "pcs" else f"pcs-{args.pcs_command}"
    inputs = {k: getattr(args, k) for k in ("val", "gen", "q", "poly", "field") if getattr(args, k, None)}
    return make_report(op, inputs, result, seed=args.seed)


def run(argv: Optional[list[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        outcome = args.func(args)
    except (ParseError, ValueError, ZeroDivisionError, Unsupported, NonSimpleRoot, DegenerateConstant) as exc:
        print(f"valkey: input error: {exc}", file=err)
        return EXIT_INPUT
    except LimitInK as exc:
        outcome = Outcome(_error_report(args, "limit-in-K", str(exc)), EXIT_VIOLATION)
    except (BudgetExhausted, Indeterminate, NotFixed) as exc:
        extra = None
        if isinstance(exc, Indeterminate) and exc.report is not None:
            extra = {"observed": exc.report.to_dict()}
        outcome = Outcome(_error_report(args, type(exc).__name__, str(exc), extra), EXIT_BUDGET)
    text = render_text(outcome.report) if args.output == "text" else dumps(outcome.report)
    print(text, file=out)
    return outcome.code


def main(argv: Optional[list[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
