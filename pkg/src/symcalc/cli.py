"""Command-line front end.

Subcommands: parse, check, reduce, graph, sn, sweep, props, repl.  Exit
codes: 0 success, 1 user error (parse or type), 2 budget exhaustion.  The
environment variable SYMCALC_BUDGET overrides the default node budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analyzer, report as report_mod, trace as trace_mod
from . import types as ty
from .enumeration import EnumSpec
from .errors import (BudgetExhaustedError, ParseError, SymcalcError,
                     TypeCheckError)
from .lbar import engine as lbar_engine
from .lbar import syntax as lbar
from .lmu import engine as lmu_engine
from .lmu import syntax as lmu
from .steps import Step
from .typecheck import (Contexts, check_subject_reduction, derivation_to_json,
                        typecheck_lbar, typecheck_lmu)

DEFAULT_RULES = {
    "lbar": ",".join(lbar_engine.ALL_RULES),
    "lmu": ",".join(lmu_engine.DEFAULT_RULES),
}

STRATEGY_ALIASES = {
    "leftmost": "leftmost-outermost",
    "rightmost": "rightmost-innermost",
}


def default_budget() -> int:
    env = os.environ.get("SYMCALC_BUDGET")
    return int(env) if env else analyzer.DEFAULT_NODE_BUDGET


def _mods(calculus: str):
    if calculus == "lmu":
        return lmu, lmu_engine
    return lbar, lbar_engine


def read_input(args) -> str:
    if args.input in (None, "-"):
        return sys.stdin.read()
    return Path(args.input).read_text(encoding="utf-8")


def parse_term(calculus: str, text: str):
    if calculus == "lmu":
        return lmu.parse_lmu(text.strip())
    return lbar.parse_lbar(text.strip())


def parse_rules(calculus: str, spec: str) -> tuple:
    syn, eng = _mods(calculus)
    valid = lbar_engine.ALL_RULES if calculus == "lbar" else lmu_engine.ALL_RULES
    rules = []
    for raw in spec.split(","):
        name = raw.strip()
        if calculus == "lmu":
            name = lmu_engine.FROM_TRACE_TAGS.get(name, name)
        if name not in valid:
            raise SymcalcError(
                f"rule {raw.strip()!r} is not valid for {calculus} "
                f"(choose from {', '.join(valid)})")
        rules.append(name)
    return tuple(rules)


def parse_context(spec: str) -> Contexts:
    gamma: dict = {}
    delta: dict = {}
    if spec:
        for entry in spec.split(","):
            entry = entry.strip()
            if not entry:
                continue
            if ":" not in entry:
                raise SymcalcError(f"context entry {entry!r} needs name:TYPE")
            name, text = entry.split(":", 1)
            name = name.strip()
            parsed = ty.parse_type(text.strip())
            (delta if name.startswith("@") else gamma)[name] = parsed
    return Contexts(gamma, delta)


def print_term(term) -> str:
    if isinstance(term, lmu.LmuTerm):
        return lmu.print_lmu(term)
    return lbar.print_lbar(term)


def term_json(term):
    if isinstance(term, lmu.LmuTerm):
        return lmu.to_json(term)
    return lbar.to_json(term)


def _write_out(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_parse(args) -> int:
    text = read_input(args)
    term = parse_term(args.calculus, text)
    if args.calculus == "lbar" and args.sort:
        if lbar.sort_of(term) != args.sort:
            print(f"sort error: expected {args.sort}, parsed {lbar.sort_of(term)}",
                  file=sys.stderr)
            return 1
    if args.format == "json":
        _write_out(args, json.dumps(term_json(term), indent=2) + "\n")
    else:
        _write_out(args, print_term(term) + "\n")
    return 0


def cmd_check(args) -> int:
    text = read_input(args)
    term = parse_term(args.calculus, text)
    ctx = parse_context(args.ctx)
    if args.calculus == "lmu":
        tt, deriv = typecheck_lmu(term, {**ctx.gamma, **ctx.delta})
        headline = f"type: {ty.type_to_str(tt)}"
    else:
        deriv = typecheck_lbar(term, ctx.gamma, ctx.delta)
        if deriv.type_ is None:
            headline = "command typechecks"
        else:
            headline = f"type: {ty.type_to_str(deriv.type_)}"
    if args.format == "json":
        _write_out(args, json.dumps(derivation_to_json(deriv), indent=2) + "\n")
    else:
        _write_out(args, headline + "\n")
    return 0


def _replay(args, term, steps) -> int:
    syn, eng = _mods(args.calculus)
    current = term if term is not None else steps[0].source
    for i, step in enumerate(steps):
        expected = step.target
        current = eng.contract(current, step.redex)
        if not syn.alpha_eq(current, expected):
            print(f"replay diverged at step {i + 1}", file=sys.stderr)
            return 1
    print(print_term(current))
    return 0


def cmd_reduce(args) -> int:
    syn, eng = _mods(args.calculus)
    if args.replay:
        steps = trace_mod.read_trace(args.replay, args.calculus)
        if not steps:
            print("empty trace", file=sys.stderr)
            return 1
        term = parse_term(args.calculus, read_input(args)) if args.input else None
        return _replay(args, term, steps)
    term = parse_term(args.calculus, read_input(args))
    rules = parse_rules(args.calculus, args.rules)
    strategy = STRATEGY_ALIASES.get(args.strategy, args.strategy)
    try:
        final, steps = eng.normalize(term, rules, strategy,
                                     args.max_steps, args.seed)
    except BudgetExhaustedError as e:
        if args.out:
            trace_mod.write_trace(args.out, e.steps, args.calculus)
        print(f"budget exhausted after {len(e.steps)} steps; "
              f"current term: {print_term(e.term)}", file=sys.stderr)
        return 2
    if args.out:
        trace_mod.write_trace(args.out, steps, args.calculus)
    if args.format == "json":
        print(json.dumps({"final": term_json(final), "steps": len(steps),
                          "strategy": strategy, "seed": args.seed}))
    else:
        for step in steps:
            tag = step.redex.rule
            if args.calculus == "lmu":
                tag = lmu_engine.TRACE_TAGS.get(tag, tag)
            print(f"{tag} @ {list(step.redex.position)}: "
                  f"{print_term(step.target)}")
        print(print_term(final))
    return 0


def cmd_graph(args) -> int:
    term = parse_term(args.calculus, read_input(args))
    rules = parse_rules(args.calculus, args.rules)
    g = analyzer.build_graph(term, rules, args.budget)
    if args.format == "dot":
        _write_out(args, analyzer.export_dot(g))
    elif args.format == "json":
        ids = {key: i for i, key in enumerate(g.nodes)}
        payload = {
            "complete": g.complete,
            "rules": list(g.rules),
            "nodes": [{"id": ids[k], "term": print_term(t)}
                      for k, t in g.nodes.items()],
            "edges": [{"from": ids[s], "rule": r, "position": list(p),
                       "to": ids[t]} for s, r, p, t in g.edges],
        }
        _write_out(args, json.dumps(payload, indent=2) + "\n")
    else:
        nfs = g.normal_forms() if g.complete else []
        lines = [f"nodes: {len(g.nodes)}", f"edges: {len(g.edges)}",
                 f"complete: {g.complete}"]
        lines += [f"normal form: {print_term(t)}" for t in nfs]
        _write_out(args, "\n".join(lines) + "\n")
    return 0 if g.complete else 2


def cmd_sn(args) -> int:
    term = parse_term(args.calculus, read_input(args))
    rules = parse_rules(args.calculus, args.rules)
    verdict = analyzer.sn_check(term, rules, args.budget)
    match verdict:
        case analyzer.Sn(eta, etac, nodes):
            if args.format == "json":
                print(json.dumps({"verdict": "sn", "eta": eta,
                                  "etac": list(etac), "nodes": nodes}))
            else:
                print(f"SN eta={eta}")
            return 0
        case analyzer.CycleFound(path, nodes):
            if args.format == "json":
                print(json.dumps({"verdict": "cycle", "length": len(path),
                                  "nodes": nodes}))
            else:
                print(f"not SN: cycle reached after {len(path)} steps")
            return 0
        case analyzer.BudgetExhausted(nodes):
            if args.format == "json":
                print(json.dumps({"verdict": "budget", "nodes": nodes}))
            else:
                print(f"budget exhausted after {nodes} nodes")
            return 2
    return 0


def cmd_sweep(args) -> int:
    spec = EnumSpec(args.grammar, args.max_cxty, args.lvars, args.rvars,
                    args.typed, tuple(args.atoms.split(",")), args.type_lg)
    calculus = "lmu" if args.grammar == "lmu" else "lbar"
    rules = parse_rules(calculus, args.rules)
    rep = analyzer.sweep_sn(spec, rules, args.budget)
    if args.out:
        paths = report_mod.write_sweep_outputs(rep, args.out)
        for p in paths:
            print(f"wrote {p}")
    if args.format == "json":
        print(json.dumps(rep.to_json()))
    else:
        print(f"total={rep.total} sn={rep.sn} cycle={rep.cycle} "
              f"budget={rep.budget} max_eta={rep.max_eta}")
        if rep.violations:
            for v in rep.violations[:20]:
                print(f"violation: {v}")
    return 0 if rep.clean else 2


def cmd_props(args) -> int:
    spec = EnumSpec("lmu", args.max_cxty, args.lvars, args.rvars)
    rep = analyzer.search_counterexamples(args.property, spec, args.budget)
    if args.out:
        for p in report_mod.write_props_outputs(rep, args.out):
            print(f"wrote {p}")
    if args.format == "json":
        print(json.dumps(rep.to_json()))
    else:
        print(f"property {rep.property_id}: tuples={rep.total} "
              f"confirmed={rep.confirmed} hypothesis_failed={rep.hypothesis_failed} "
              f"suspects={len(rep.suspects)} inconclusive={len(rep.inconclusive)}")
        for s in rep.suspects[:20]:
            print(f"suspect: {s}")
    return 0


# ---------------------------------------------------------------------------
# Interactive stepping.

def run_repl(term, calculus: str, rules, ctx: Contexts,
             instream, outstream, max_steps: int = 1000) -> list[Step]:
    """Drive a step-by-step reduction session; returns the step transcript."""
    syn, eng = _mods(calculus)
    history = [term]
    steps: list[Step] = []

    def say(text):
        print(text, file=outstream)

    say(f"term: {print_term(term)}")
    while True:
        current = history[-1]
        redexes = eng.find_redexes(current, rules)
        if redexes:
            for i, r in enumerate(redexes, start=1):
                tag = r.rule if calculus != "lmu" else \
                    lmu_engine.TRACE_TAGS.get(r.rule, r.rule)
                say(f"  [{i}] {tag} @ {list(r.position)}")
        else:
            say("  (normal form)")
        print("> ", file=outstream, end="", flush=True)
        line = instream.readline()
        if not line:
            break
        cmd = line.strip()
        if not cmd:
            continue
        if cmd in ("quit", "q", "exit"):
            break
        if cmd == "undo":
            if len(history) > 1:
                history.pop()
                steps.pop()
                say(f"term: {print_term(history[-1])}")
            else:
                say("nothing to undo")
            continue
        if cmd == "type":
            try:
                if calculus == "lmu":
                    tt, _ = typecheck_lmu(current, {**ctx.gamma, **ctx.delta})
                    say(f"type: {ty.type_to_str(tt)}")
                else:
                    d = typecheck_lbar(current, ctx.gamma, ctx.delta)
                    say("command typechecks" if d.type_ is None
                        else f"type: {ty.type_to_str(d.type_)}")
            except TypeCheckError as e:
                say(f"type error: {e}")
            continue
        if cmd.startswith("auto"):
            parts = cmd.split()
            strategy = parts[1] if len(parts) > 1 else "leftmost-outermost"
            strategy = STRATEGY_ALIASES.get(strategy, strategy)
            seed = int(parts[2]) if len(parts) > 2 else 0
            try:
                final, auto_steps = eng.normalize(
                    current, rules, strategy, max_steps, seed)
            except BudgetExhaustedError as e:
                say(f"budget exhausted after {len(e.steps)} steps")
                continue
            for step in auto_steps:
                history.append(step.target)
                steps.append(step)
                say(f"{step.redex.rule} @ {list(step.redex.position)}: "
                    f"{print_term(step.target)}")
            say(f"term: {print_term(final)}")
            continue
        try:
            index = int(cmd)
        except ValueError:
            say(f"unrecognized command {cmd!r} "
                "(index, undo, auto <strategy>, type, quit)")
            continue
        if not 1 <= index <= len(redexes):
            say(f"no redex numbered {index}")
            continue
        redex = redexes[index - 1]
        target = eng.contract(current, redex)
        steps.append(Step(current, redex, target))
        history.append(target)
        say(f"term: {print_term(target)}")
    return steps


def cmd_repl(args) -> int:
    term = parse_term(args.calculus, read_input(args))
    rules = parse_rules(args.calculus, args.rules)
    ctx = parse_context(args.ctx)
    steps = run_repl(term, args.calculus, rules, ctx,
                     sys.stdin, sys.stdout, args.max_steps)
    if args.out and steps:
        trace_mod.write_trace(args.out, steps, args.calculus)
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Argument wiring.

def _add_common(p, calculus=True, rules=True, budget=False, fmt=("text", "json")):
    if calculus:
        p.add_argument("--calculus", choices=("lbar", "lmu"), default="lbar")
    if rules:
        p.add_argument("--rules", default=None,
                       help="comma-separated rule tags (defaults per calculus)")
    if budget:
        p.add_argument("--budget", type=int, default=None,
                       help="node budget (SYMCALC_BUDGET overrides the default)")
    p.add_argument("--format", choices=fmt, default="text")
    p.add_argument("--out", default=None, help="write output to this path")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="symcalc",
        description="workbench for two symmetric classical-logic calculi")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a term and print it back")
    _add_common(p, rules=False)
    p.add_argument("--sort", choices=(lbar.COMMAND, lbar.LTERM, lbar.RTERM),
                   default=None, help="require this syntactic category (lbar)")
    p.add_argument("input", nargs="?", default=None,
                   help="term file, or - for stdin")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", help="typecheck a term")
    _add_common(p, rules=False)
    p.add_argument("--ctx", default="",
                   help="context entries, e.g. 'x:A,@a:A -> A'")
    p.add_argument("input", nargs="?", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="normalize a term under a strategy")
    _add_common(p)
    p.add_argument("--strategy", default="leftmost-outermost")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replay", default=None,
                   help="replay a JSON-lines trace instead of reducing")
    p.add_argument("input", nargs="?", default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("graph", help="build the bounded reduction graph")
    _add_common(p, budget=True, fmt=("text", "json", "dot"))
    p.add_argument("input", nargs="?", default=None)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("sn", help="strong-normalization verdict")
    _add_common(p, budget=True)
    p.add_argument("input", nargs="?", default=None)
    p.set_defaults(func=cmd_sn)

    p = sub.add_parser("sweep", help="exhaustive verdict sweep over enumerated terms")
    _add_common(p, calculus=False, budget=True)
    p.add_argument("--grammar", dest="grammar",
                   choices=("lbar", "lbar-restricted", "lmu"), default="lbar")
    p.add_argument("--max-cxty", type=int, default=6)
    p.add_argument("--lvars", type=int, default=2)
    p.add_argument("--rvars", type=int, default=2)
    p.add_argument("--typed", action="store_true")
    p.add_argument("--atoms", default="A")
    p.add_argument("--type-lg", type=int, default=3)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("props", help="counterexample search for the three "
                                     "compound-normalization properties")
    _add_common(p, calculus=False, rules=False, budget=True)
    p.add_argument("--property", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--max-cxty", type=int, default=6)
    p.add_argument("--lvars", type=int, default=2)
    p.add_argument("--rvars", type=int, default=2)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("repl", help="interactive step-by-step reduction")
    _add_common(p)
    p.add_argument("--ctx", default="")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("input", nargs="?", default=None)
    p.set_defaults(func=cmd_repl)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "rules") and args.rules is None:
        args.rules = DEFAULT_RULES.get(
            getattr(args, "calculus", None)
            or ("lmu" if getattr(args, "grammar", "") == "lmu" else "lbar"))
    if hasattr(args, "budget") and args.budget is None:
        args.budget = default_budget()
    try:
        return args.func(args)
    except BudgetExhaustedError as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return 2
    except (ParseError, TypeCheckError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SymcalcError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
