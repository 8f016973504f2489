"""One-step reduction for the sequent calculus: redex enumeration, rule
contraction, the linear mu restriction, normalization strategies, and the
constructive postponement of simplification steps.

Rules.  The four logical rules fire at commands:

    lam:     < \\x. tl | tpl :: tr >  >>  < tpl | mu x. < tl | tr > >
    lbar:    < tpr :: tl | \\@a. tr > >>  < mu @a. < tl | tr > | tpr >
    mu:      < mu @a. c | tr >        >>  c[@a := tr]
    mutilde: < tl | mu x. c >         >>  c[x := tl]

The two simplification rules erase a trivial mu binder:

    s_l:  mu @a. < tl | @a >  >>  tl    when @a not free in tl
    s_r:  mu x. < x | tr >    >>  tr    when x not free in tr
"""

from __future__ import annotations

import random
from typing import Optional

from ..errors import BudgetExhaustedError, PostponeError, StaleRedexError
from ..steps import Redex, Step
from . import syntax as S
from .syntax import (Command, LAbs, LConsR, LMu, LVar, RAbs, RConsL, RMu,
                     RVar)

LOGICAL_RULES = ("lam", "lbar", "mu", "mutilde")
SIMPLIFICATION_RULES = ("s_l", "s_r")
ALL_RULES = LOGICAL_RULES + SIMPLIFICATION_RULES

_RULE_RANK = {r: i for i, r in enumerate(ALL_RULES)}

STRATEGIES = ("leftmost-outermost", "rightmost-innermost", "random")


def _matches(node, rule: str) -> bool:
    match rule, node:
        case "lam", Command(LAbs(), LConsR()):
            return True
        case "lbar", Command(RConsL(), RAbs()):
            return True
        case "mu", Command(LMu(), _):
            return True
        case "mutilde", Command(_, RMu()):
            return True
        case "s_l", LMu(v, Command(tl, RVar(w)), _) if v == w:
            return v not in S.free_vars(tl)[1]
        case "s_r", RMu(v, Command(LVar(w), tr), _) if v == w:
            return v not in S.free_vars(tr)[0]
    return False


def find_redexes(t, rules=ALL_RULES) -> list[Redex]:
    """All enabled redexes, leftmost-outermost first.

    Two rules can share a position (a command whose two sides are mu terms);
    ties are ordered by the fixed rule order lam, lbar, mu, mutilde, s_l,
    s_r.
    """
    rules = tuple(rules)
    out = []
    for pos, node in S.subterms(t):
        for rule in rules:
            if _matches(node, rule):
                out.append(Redex(pos, rule))
    out.sort(key=lambda r: (r.position, _RULE_RANK[r.rule]))
    return out


def _contract_node(node, rule: str):
    match rule, node:
        case "lam", Command(LAbs(x, tl, an), LConsR(tpl, tr)):
            # x is rebound over tr; rename when tr mentions it free
            if x in S.free_vars(tr)[0]:
                x2 = S.fresh_name(x, set().union(*S.free_vars(tl), *S.free_vars(tr)))
                tl = S.subst_l(tl, x, LVar(x2))
                x = x2
            return Command(tpl, RMu(x, Command(tl, tr), an))
        case "lbar", Command(RConsL(tpr, tl), RAbs(a, tr, an)):
            if a in S.free_vars(tl)[1]:
                a2 = S.fresh_name(a, set().union(*S.free_vars(tl), *S.free_vars(tr)))
                tr = S.subst_r(tr, a, RVar(a2))
                a = a2
            return Command(LMu(a, Command(tl, tr), an), tpr)
        case "mu", Command(LMu(a, c, _), tr):
            return S.subst_r(c, a, tr)
        case "mutilde", Command(tl, RMu(x, c, _)):
            return S.subst_l(c, x, tl)
        case "s_l", LMu(_, Command(tl, _), _):
            return tl
        case "s_r", RMu(_, Command(_, tr), _):
            return tr
    raise StaleRedexError(f"rule {rule} does not match {node}")


def contract(t, redex: Redex):
    """Contract one redex; raises ``StaleRedexError`` if it does not match."""
    node = S.subterm_at(t, redex.position)
    if not _matches(node, redex.rule):
        raise StaleRedexError(
            f"no {redex.rule} redex at position {list(redex.position)}")
    return S.replace_at(t, redex.position, _contract_node(node, redex.rule))


def is_l0(t, redex: Redex) -> bool:
    """Whether a mu or mutilde redex is linear: the bound variable has at
    most one free occurrence in the binder body."""
    node = S.subterm_at(t, redex.position)
    if redex.rule == "mu":
        if not isinstance(node, Command) or not isinstance(node.left, LMu):
            raise StaleRedexError("is_l0 expects a mu redex")
        return S.occurrences(node.left.body, node.left.var) <= 1
    if redex.rule == "mutilde":
        if not isinstance(node, Command) or not isinstance(node.right, RMu):
            raise StaleRedexError("is_l0 expects a mutilde redex")
        return S.occurrences(node.right.body, node.right.var) <= 1
    raise StaleRedexError(f"is_l0 applies to mu and mutilde redexes, not {redex.rule}")


def one_step_reducts(t, rules=ALL_RULES):
    """All (redex, reduct) pairs reachable in one step."""
    return [(r, contract(t, r)) for r in find_redexes(t, rules)]


# ---------------------------------------------------------------------------
# Normalization driver.

def pick_redex(redexes: list[Redex], strategy: str,
               rng: Optional[random.Random] = None) -> Redex:
    if strategy == "leftmost-outermost":
        return min(redexes, key=lambda r: (r.position, _RULE_RANK[r.rule]))
    if strategy == "rightmost-innermost":
        return max(redexes, key=lambda r: (r.position, _RULE_RANK[r.rule]))
    if strategy == "random":
        if rng is None:
            raise ValueError("random strategy needs a seeded generator")
        return rng.choice(redexes)
    raise ValueError(f"unknown strategy {strategy!r}")


def normalize(t, rules=ALL_RULES, strategy: str = "leftmost-outermost",
              max_steps: int = 1000, seed: Optional[int] = None):
    """Reduce to a normal form, returning (normal form, step list).

    Raises ``BudgetExhaustedError`` carrying the partial trace when no
    normal form is reached within ``max_steps``.
    """
    rng = random.Random(seed) if strategy == "random" else None
    steps: list[Step] = []
    current = t
    for _ in range(max_steps):
        redexes = find_redexes(current, rules)
        if not redexes:
            return current, steps
        redex = pick_redex(redexes, strategy, rng)
        target = contract(current, redex)
        steps.append(Step(current, redex, target))
        current = target
    if not find_redexes(current, rules):
        return current, steps
    raise BudgetExhaustedError(
        f"no normal form within {max_steps} steps", term=current, steps=steps)


# ---------------------------------------------------------------------------
# Postponement of simplification steps.
#
# Given an adjacent pair (s-step at p, then logical step at q), the
# commutation depends on where q sits relative to p:
#
#   * disjoint positions: plain swap;
#   * q inside the s-contractum: fire the logical step in the original
#     term (shifted into the erased mu wrapper), then the s-step;
#   * p inside the logical redex, at a metavariable of its pattern: fire
#     the logical rule first, then contract every residual copy of the
#     s-redex (a mu or mutilde step may duplicate or erase it);
#   * p at a pattern node of the logical redex: the s-step is what exposed
#     the pattern, and the original term instead has a linear mu/mutilde
#     redex at q whose firing reproduces it (the "l0 then l" branch).

# Metavariable positions of each logical rule's pattern, with the prefix
# mapping from the left-hand side to the right-hand side.
_METAVARS = {
    "lam": {(0, 0): (1, 0, 0), (1, 0): (0,), (1, 1): (1, 0, 1)},
    "lbar": {(0, 0): (1,), (0, 1): (0, 0, 0), (1, 0): (0, 0, 1)},
    # mu/mutilde handled specially: the binder body moves to the root and
    # the other side is duplicated at each free occurrence of the binder.
}

_PATTERN_NODES = {"lam": {(0,), (1,)}, "lbar": {(0,), (1,)},
                  "mu": {(0,)}, "mutilde": {(1,)}}


def _is_prefix(a: tuple, b: tuple) -> bool:
    return len(a) <= len(b) and b[:len(a)] == a


def _mk_step(term, position, rule) -> Step:
    redex = Redex(tuple(position), rule)
    return Step(term, redex, contract(term, redex))


def postpone_once(u, s_step: Step, l_step: Step) -> list[Step]:
    """Commute one adjacent s-then-logical pair starting at ``u``.

    Returns a replacement sequence from ``u`` to a term alpha-equal to the
    logical step's target, of shape logical-then-s* or linear-mu-then-
    logical.
    """
    if s_step.source != u or l_step.source != s_step.target:
        raise PostponeError("the two steps do not chain from u")
    if s_step.redex.rule not in SIMPLIFICATION_RULES:
        raise PostponeError("first step must be a simplification step")
    if l_step.redex.rule not in LOGICAL_RULES:
        raise PostponeError("second step must be a logical step")

    p = s_step.redex.position
    q = l_step.redex.position
    lrule = l_step.redex.rule
    w = l_step.target

    if not _is_prefix(p, q) and not _is_prefix(q, p):
        # disjoint: both redexes exist in both terms
        first = _mk_step(u, q, lrule)
        second = _mk_step(first.target, p, s_step.redex.rule)
        result = [first, second]
    elif _is_prefix(p, q):
        # the logical redex lives inside the s-contractum; in u that
        # subterm sits under the erased binder and command
        inner = (0, 0) if s_step.redex.rule == "s_l" else (0, 1)
        first = _mk_step(u, p + inner + q[len(p):], lrule)
        second = _mk_step(first.target, p, s_step.redex.rule)
        result = [first, second]
    else:
        rel = p[len(q):]
        if rel in _PATTERN_NODES[lrule]:
            # the s-step exposed a pattern node; u instead has a linear
            # mu/mutilde redex at q reproducing the s-target
            inserted = "mu" if rel == (0,) else "mutilde"
            first = _mk_step(u, q, inserted)
            if not is_l0(u, first.redex):
                raise PostponeError("inserted step is not linear")
            second = _mk_step(first.target, q, lrule)
            result = [first, second]
        else:
            result = _commute_into_metavar(u, s_step, l_step, q, rel)

    final = result[-1].target
    if not S.alpha_eq(final, w):
        raise PostponeError("postponed sequence does not reach the same term")
    return result


def _commute_into_metavar(u, s_step, l_step, q, rel) -> list[Step]:
    """Fire the logical rule first; the s-redex survives as zero or more
    residual copies whose positions are computed from the rule's shape."""
    lrule = l_step.redex.rule
    node = S.subterm_at(u, q)
    if lrule in ("lam", "lbar"):
        for lhs_prefix, rhs_prefix in _METAVARS[lrule].items():
            if _is_prefix(lhs_prefix, rel):
                residuals = [q + rhs_prefix + rel[len(lhs_prefix):]]
                break
        else:
            raise PostponeError(f"cannot locate s-redex inside {lrule} redex")
    elif lrule == "mu":
        binder = node.left
        if _is_prefix((0, 0), rel):
            residuals = [q + rel[2:]]
        else:
            # inside the substituted right side: one copy per free
            # occurrence of the binder variable in the body
            occ = S.free_occurrence_positions(binder.body, binder.var)
            residuals = [q + o + rel[1:] for o in occ]
    else:  # mutilde
        binder = node.right
        if _is_prefix((1, 0), rel):
            residuals = [q + rel[2:]]
        else:
            occ = S.free_occurrence_positions(binder.body, binder.var)
            residuals = [q + o + rel[1:] for o in occ]

    steps = [_mk_step(u, q, lrule)]
    # residuals are pairwise disjoint; contract deterministically
    for pos in sorted(residuals):
        steps.append(_mk_step(steps[-1].target, pos, s_step.redex.rule))
    return steps


def postpone(seq: list[Step], budget: Optional[int] = None) -> list[Step]:
    """Rewrite a reduction sequence so logical steps precede s-steps.

    Repeatedly commutes the rightmost adjacent s-before-logical pair.  The
    result starts from the same term and ends alpha-equal to the input's
    final term.  A step budget bounds the loop; running out raises
    ``PostponeError`` rather than returning a partial answer.
    """
    steps = list(seq)
    for a, b in zip(steps, steps[1:]):
        if a.target != b.source:
            raise PostponeError("input steps do not chain")
    if budget is None:
        budget = 1000 + 4 ** (len(steps) + 2)
    while True:
        idx = None
        for i in range(len(steps) - 2, -1, -1):
            if (steps[i].redex.rule in SIMPLIFICATION_RULES
                    and steps[i + 1].redex.rule in LOGICAL_RULES):
                idx = i
                break
        if idx is None:
            if seq and steps:
                if not S.alpha_eq(steps[-1].target, seq[-1].target):
                    raise PostponeError("postponement changed the endpoint")
            return steps
        budget -= 1
        if budget < 0:
            raise PostponeError("postponement budget exhausted")
        replacement = postpone_once(steps[idx].source, steps[idx], steps[idx + 1])
        # replay the suffix: later steps were built from an alpha-variant
        new_steps = steps[:idx] + replacement
        current = replacement[-1].target
        for old in steps[idx + 2:]:
            nxt = _mk_step(current, old.redex.position, old.redex.rule)
            new_steps.append(nxt)
            current = nxt.target
        steps = new_steps
