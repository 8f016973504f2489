"""One-step reduction for the symmetric lambda-mu calculus with
configurable rule sets.

    beta:     (\\x. M  N)      >>  M[x := N]
    mu:       (mu @a. M  N)    >>  mu @a. M[@a =r N]
    mu_prime: (N  mu @a. M)    >>  mu @a. M[@a =l N]
    rho:      [@a] mu @b. M    >>  M[@b := @a]
    theta:    mu @a. [@a] M    >>  M        when @a not free in M

Rule sets are explicit configuration: different subsets have very
different termination behaviour, so nothing here hard-codes one.
"""

from __future__ import annotations

import random
from typing import Optional

from ..errors import BudgetExhaustedError, StaleRedexError
from ..steps import Redex, Step
from .. import types as ty
from . import syntax as S
from .syntax import Abs, App, Mu, Named, Var

ALL_RULES = ("beta", "mu", "mu_prime", "rho", "theta")
DEFAULT_RULES = ("beta", "mu", "mu_prime")

_RULE_RANK = {r: i for i, r in enumerate(ALL_RULES)}

# the trace file format spells mu_prime with a prime mark
TRACE_TAGS = {"beta": "beta", "mu": "mu", "mu_prime": "mu'",
              "rho": "rho", "theta": "theta"}
FROM_TRACE_TAGS = {v: k for k, v in TRACE_TAGS.items()} | {
    "mu_prime": "mu_prime"}


def _matches(node, rule: str) -> bool:
    match rule, node:
        case "beta", App(Abs(), _):
            return True
        case "mu", App(Mu(), _):
            return True
        case "mu_prime", App(_, Mu()):
            return True
        case "rho", Named(_, Mu()):
            return True
        case "theta", Mu(v, Named(w, body), _) if v == w:
            return v not in S.free_vars(body)[1]
    return False


def find_redexes(t, rules=DEFAULT_RULES) -> list[Redex]:
    """All enabled redexes, leftmost-outermost first; ties at one position
    are ordered beta, mu, mu_prime, rho, theta."""
    rules = tuple(rules)
    out = []
    for pos, node in S.subterms(t):
        for rule in rules:
            if _matches(node, rule):
                out.append(Redex(pos, rule))
    out.sort(key=lambda r: (r.position, _RULE_RANK[r.rule]))
    return out


def _freshen_mu_binder(binder: Mu, value) -> Mu:
    """Rename the bound mu-variable away from the free mu-variables of a
    term about to be substituted under it."""
    _, fm = S.free_vars(value)
    if binder.var not in fm:
        return binder
    fresh = S.fresh_name(binder.var, fm | S.free_vars(binder.body)[1])
    return Mu(fresh, S.rename_mu(binder.body, binder.var, fresh), binder.annot)


def _contract_node(node, rule: str):
    match rule, node:
        case "beta", App(Abs(x, body, _), arg):
            return S.subst_beta(body, x, arg)
        case "mu", App(Mu() as binder, arg):
            binder = _freshen_mu_binder(binder, arg)
            annot = binder.annot.right if isinstance(binder.annot, ty.Arrow) else None
            return Mu(binder.var,
                      S.subst_mu_r(binder.body, binder.var, arg), annot)
        case "mu_prime", App(fun, Mu() as binder):
            binder = _freshen_mu_binder(binder, fun)
            # the result type depends on the function side, which is not
            # visible here; the typed checker re-derives the annotation
            return Mu(binder.var,
                      S.subst_mu_l(binder.body, binder.var, fun), None)
        case "rho", Named(a, Mu(b, body, _)):
            return S.rename_mu(body, b, a)
        case "theta", Mu(_, Named(_, body), _):
            return body
    raise StaleRedexError(f"rule {rule} does not match {node}")


def contract(t, redex: Redex):
    """Contract one redex; raises ``StaleRedexError`` if it does not match."""
    node = S.subterm_at(t, redex.position)
    if not _matches(node, redex.rule):
        raise StaleRedexError(
            f"no {redex.rule} redex at position {list(redex.position)}")
    return S.replace_at(t, redex.position, _contract_node(node, redex.rule))


def one_step_reducts(t, rules=DEFAULT_RULES):
    return [(r, contract(t, r)) for r in find_redexes(t, rules)]


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


def normalize(t, rules=DEFAULT_RULES, strategy: str = "leftmost-outermost",
              max_steps: int = 1000, seed: Optional[int] = None):
    """Reduce to a normal form, returning (normal form, step list); raises
    ``BudgetExhaustedError`` with the partial trace when the budget ends."""
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
