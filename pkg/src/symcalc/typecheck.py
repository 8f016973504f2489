"""Typecheckers for both calculi, derivation trees, and subject-reduction
verification.

The sequent-style calculus is checked against its two-sided sequent rules
(axioms for both variable kinds, the arrow and minus introductions on each
side, the cut rule for commands, and the two mu rules).  The lambda-mu
calculus is checked against natural deduction with ``bot``: contexts give
lambda-variables a type ``A`` and mu-variables a negation ``A -> bot``.

Checking is Church style: every binder must carry a type annotation, which
makes the rules syntax directed, so a term has at most one derivation in
given contexts.  Bound variables may shadow outer declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import types as ty
from .errors import BudgetExhaustedError, TypeCheckError
from .lbar import engine as lbar_engine
from .lbar import syntax as lbar
from .lmu import engine as lmu_engine
from .lmu import syntax as lmu
from .types import lg  # re-exported measure

__all__ = ["lg", "Contexts", "Derivation", "typecheck_lbar", "typecheck_lmu",
           "check_subject_reduction", "SubjectReductionReport",
           "derivation_at", "derivation_to_json"]


@dataclass(frozen=True)
class Contexts:
    """A pair of typing contexts: ``gamma`` for l-variables, ``delta`` for
    r-variables."""
    gamma: Mapping[str, ty.TypeExpr] = field(default_factory=dict)
    delta: Mapping[str, ty.TypeExpr] = field(default_factory=dict)


@dataclass(frozen=True)
class Derivation:
    """One typing-rule instance; premises parallel the term's children."""
    rule: str
    term: object
    type_: Optional[ty.TypeExpr]
    gamma: tuple
    delta: tuple
    premises: tuple

    def judgment(self) -> str:
        g = ", ".join(f"{n}:{ty.type_to_str(t)}" for n, t in self.gamma)
        d = ", ".join(f"{n}:{ty.type_to_str(t)}" for n, t in self.delta)
        subject = str(self.term)
        if self.type_ is not None:
            subject = f"{subject} : {ty.type_to_str(self.type_)}"
        if self.delta or any(n.startswith("@") for n, _ in self.gamma):
            return f"{g} |- {subject}{', ' + d if d else ''}"
        return f"{g} |- {subject}"


def derivation_to_json(d: Derivation):
    return {"rule": d.rule, "judgment": d.judgment(),
            "premises": [derivation_to_json(p) for p in d.premises]}


def derivation_at(d: Derivation, position) -> Derivation:
    """Subderivation for the subterm at a position (premises parallel
    children)."""
    for i in position:
        d = d.premises[i]
    return d


def _items(ctx: Mapping) -> tuple:
    return tuple(sorted(ctx.items(), key=lambda kv: kv[0]))


# ---------------------------------------------------------------------------
# Sequent-style calculus.

def typecheck_lbar(t, gamma: Mapping[str, ty.TypeExpr],
                   delta: Mapping[str, ty.TypeExpr]) -> Derivation:
    """Check a term of any sort; commands get a derivation with no type."""
    return _check_lbar(t, dict(gamma), dict(delta), ())


def _check_lbar(t, gamma, delta, path) -> Derivation:
    match t:
        case lbar.LVar(n):
            if n not in gamma:
                raise TypeCheckError(f"unbound l-variable {n}", path)
            return _deriv("ax_lvar", t, gamma[n], gamma, delta)
        case lbar.RVar(n):
            if n not in delta:
                raise TypeCheckError(f"unbound r-variable {n}", path)
            return _deriv("ax_rvar", t, delta[n], gamma, delta)
        case lbar.Command(l, r):
            dl = _check_lbar(l, gamma, delta, path + (0,))
            dr = _check_lbar(r, gamma, delta, path + (1,))
            if dl.type_ != dr.type_:
                raise TypeCheckError(
                    f"cut type clash: {ty.type_to_str(dl.type_)} vs "
                    f"{ty.type_to_str(dr.type_)}", path)
            return _deriv("cut", t, None, gamma, delta, (dl, dr))
        case lbar.LAbs(v, b, an):
            _need_annot(an, v, path)
            db = _check_lbar(b, gamma | {v: an}, delta, path + (0,))
            return _deriv("labs", t, ty.Arrow(an, db.type_), gamma, delta, (db,))
        case lbar.RAbs(v, b, an):
            _need_annot(an, v, path)
            db = _check_lbar(b, gamma, delta | {v: an}, path + (0,))
            return _deriv("rabs", t, ty.Minus(db.type_, an), gamma, delta, (db,))
        case lbar.LMu(v, b, an):
            _need_annot(an, v, path)
            db = _check_lbar(b, gamma, delta | {v: an}, path + (0,))
            return _deriv("lmu", t, an, gamma, delta, (db,))
        case lbar.RMu(v, b, an):
            _need_annot(an, v, path)
            db = _check_lbar(b, gamma | {v: an}, delta, path + (0,))
            return _deriv("rmu", t, an, gamma, delta, (db,))
        case lbar.LConsR(h, tl):
            dh = _check_lbar(h, gamma, delta, path + (0,))
            dt = _check_lbar(tl, gamma, delta, path + (1,))
            return _deriv("lconsr", t, ty.Arrow(dh.type_, dt.type_),
                          gamma, delta, (dh, dt))
        case lbar.RConsL(h, tl):
            dh = _check_lbar(h, gamma, delta, path + (0,))
            dt = _check_lbar(tl, gamma, delta, path + (1,))
            return _deriv("rconsl", t, ty.Minus(dt.type_, dh.type_),
                          gamma, delta, (dh, dt))
    raise TypeCheckError(f"not a term: {t!r}", path)


def _deriv(rule, term, type_, gamma, delta, premises=()):
    return Derivation(rule, term, type_, _items(gamma), _items(delta), premises)


def _need_annot(an, var, path):
    if an is None:
        raise TypeCheckError(f"binder {var} needs a type annotation", path)


# ---------------------------------------------------------------------------
# Lambda-mu calculus.

def check_lmu_context(ctx: Mapping[str, ty.TypeExpr]) -> None:
    """Every mu-variable entry must be a negation ``A -> bot``."""
    for name, t in ctx.items():
        if name.startswith("@") and not ty.is_neg(t):
            raise TypeCheckError(
                f"context entry for {name} must be a negation, got "
                f"{ty.type_to_str(t)}")


def typecheck_lmu(m, ctx: Mapping[str, ty.TypeExpr]) -> tuple[ty.TypeExpr, Derivation]:
    check_lmu_context(ctx)
    d = _check_lmu(m, dict(ctx), ())
    return d.type_, d


def _check_lmu(m, ctx, path) -> Derivation:
    match m:
        case lmu.Var(n):
            if n not in ctx:
                raise TypeCheckError(f"unbound variable {n}", path)
            return Derivation("ax", m, ctx[n], _items(ctx), (), ())
        case lmu.Abs(v, b, an):
            _need_annot(an, v, path)
            db = _check_lmu(b, ctx | {v: an}, path + (0,))
            return Derivation("arrow_i", m, ty.Arrow(an, db.type_),
                              _items(ctx), (), (db,))
        case lmu.App(f, a):
            df = _check_lmu(f, ctx, path + (0,))
            da = _check_lmu(a, ctx, path + (1,))
            if not isinstance(df.type_, ty.Arrow):
                raise TypeCheckError(
                    f"function side has type {ty.type_to_str(df.type_)}, "
                    "an arrow is needed", path + (0,))
            if df.type_.left != da.type_:
                raise TypeCheckError(
                    f"argument type {ty.type_to_str(da.type_)} does not match "
                    f"domain {ty.type_to_str(df.type_.left)}", path + (1,))
            return Derivation("arrow_e", m, df.type_.right,
                              _items(ctx), (), (df, da))
        case lmu.Mu(v, b, an):
            _need_annot(an, v, path)
            db = _check_lmu(b, ctx | {v: ty.neg(an)}, path + (0,))
            if db.type_ != ty.BOT:
                raise TypeCheckError(
                    f"mu body must have type bot, got {ty.type_to_str(db.type_)}",
                    path + (0,))
            return Derivation("bot_e", m, an, _items(ctx), (), (db,))
        case lmu.Named(v, b):
            if v not in ctx:
                raise TypeCheckError(f"unbound mu-variable {v}", path)
            entry = ctx[v]
            db = _check_lmu(b, ctx, path + (0,))
            if not ty.is_neg(entry) or entry.left != db.type_:
                raise TypeCheckError(
                    f"{v} has type {ty.type_to_str(entry)} but is applied to a "
                    f"term of type {ty.type_to_str(db.type_)}", path)
            return Derivation("bot_i", m, ty.BOT, _items(ctx), (), (db,))
    raise TypeCheckError(f"not a term: {m!r}", path)


# ---------------------------------------------------------------------------
# Subject reduction.
#
# Sequent-calculus contraction carries annotations through every rule (the
# lam and lbar rules copy the consumed binder's annotation onto the mu they
# create), so reducts are rechecked directly.  In the lambda-mu calculus a
# mu or mu_prime step changes the type of the bound variable, so the
# contractum's binder annotation is re-derived from the source derivation:
# it is exactly the type of the application node that was contracted.

@dataclass
class SubjectReductionReport:
    root: str
    type_: Optional[str]
    nodes: int
    edges: int
    complete: bool
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations and self.complete


def check_subject_reduction(term, contexts, rules, budget: int = 10 ** 5
                            ) -> SubjectReductionReport:
    """Breadth-first check that every reduction edge preserves the typing
    judgment.  ``contexts`` is a :class:`Contexts` for sequent terms or a
    plain mapping for lambda-mu terms.  Budget exhaustion is reported in
    the result, not raised."""
    if isinstance(term, lmu.LmuTerm):
        return _sr_lmu(term, contexts, rules, budget)
    return _sr_lbar(term, contexts, rules, budget)


def _sr_lbar(term, contexts: Contexts, rules, budget) -> SubjectReductionReport:
    gamma, delta = contexts.gamma, contexts.delta
    root_deriv = typecheck_lbar(term, gamma, delta)
    expected = root_deriv.type_
    report = SubjectReductionReport(
        root=lbar.print_lbar(term),
        type_=ty.type_to_str(expected) if expected is not None else None,
        nodes=0, edges=0, complete=True, violations=[])
    seen = {lbar.canonical(term)}
    frontier = [term]
    while frontier:
        if len(seen) > budget:
            report.complete = False
            break
        nxt = []
        for t in frontier:
            report.nodes += 1
            for redex in lbar_engine.find_redexes(t, rules):
                u = lbar_engine.contract(t, redex)
                report.edges += 1
                try:
                    d = typecheck_lbar(u, gamma, delta)
                    if d.type_ != expected:
                        raise TypeCheckError(
                            f"type changed to {d.type_}", redex.position)
                except TypeCheckError as e:
                    report.violations.append(
                        {"from": lbar.print_lbar(t), "rule": redex.rule,
                         "position": list(redex.position),
                         "to": lbar.print_lbar(u), "error": str(e)})
                    continue
                key = lbar.canonical(u)
                if key not in seen:
                    seen.add(key)
                    nxt.append(u)
        frontier = nxt
    return report


def lmu_typed_contract(term, deriv: Derivation, redex):
    """Contract a redex in a typed term, restoring the binder annotation
    that a mu or mu_prime step invalidates."""
    target = lmu_engine.contract(term, redex)
    if redex.rule in ("mu", "mu_prime"):
        app_type = derivation_at(deriv, redex.position).type_
        binder = lmu.subterm_at(target, redex.position)
        patched = lmu.Mu(binder.var, binder.body, app_type)
        target = lmu.replace_at(target, redex.position, patched)
    return target


def _sr_lmu(term, ctx: Mapping, rules, budget) -> SubjectReductionReport:
    expected, root_deriv = typecheck_lmu(term, ctx)
    report = SubjectReductionReport(
        root=lmu.print_lmu(term), type_=ty.type_to_str(expected),
        nodes=0, edges=0, complete=True, violations=[])
    seen = {lmu.canonical(term)}
    frontier = [(term, root_deriv)]
    while frontier:
        if len(seen) > budget:
            report.complete = False
            break
        nxt = []
        for t, d in frontier:
            report.nodes += 1
            for redex in lmu_engine.find_redexes(t, rules):
                u = lmu_typed_contract(t, d, redex)
                report.edges += 1
                try:
                    got, du = typecheck_lmu(u, ctx)
                    if got != expected:
                        raise TypeCheckError(
                            f"type changed to {ty.type_to_str(got)}",
                            redex.position)
                except TypeCheckError as e:
                    report.violations.append(
                        {"from": lmu.print_lmu(t), "rule": redex.rule,
                         "position": list(redex.position),
                         "to": lmu.print_lmu(u), "error": str(e)})
                    continue
                key = lmu.canonical(u)
                if key not in seen:
                    seen.add(key)
                    nxt.append((u, du))
        frontier = nxt
    return report
