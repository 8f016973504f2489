"""Bounded exhaustive term enumeration for both calculi.

Terms are generated up to alpha equivalence: free variables come from a
fixed pool, bound variables are named by binder depth (``z1, z2, ...`` for
lambda kind, ``@c1, @c2, ...`` for mu kind), which makes enumerated terms
canonical representatives of their alpha classes.

The ``lbar-restricted`` mode emits only variables, mu binders, and
commands (no lambda, no cons).  Typed-only enumeration filters by the
existence of an annotation assignment, drawn from all types over the given
atoms up to a size bound, that makes the term typecheck.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

from . import types as ty
from .lbar import syntax as lbar
from .lmu import syntax as lmu

L_POOL = ("x", "y", "w", "v")
R_POOL = ("@a", "@b", "@d", "@e")


@dataclass(frozen=True)
class EnumSpec:
    calculus: str                      # "lbar" | "lbar-restricted" | "lmu"
    max_cxty: int
    n_lvars: int = 2
    n_rvars: int = 2
    typed_only: bool = False
    atoms: tuple[str, ...] = ("A",)
    max_type_lg: int = 3

    def __post_init__(self):
        if self.calculus not in ("lbar", "lbar-restricted", "lmu"):
            raise ValueError(f"unknown calculus {self.calculus!r}")
        if self.max_cxty < 1:
            raise ValueError("max_cxty must be at least 1")
        if self.n_lvars > len(L_POOL) or self.n_rvars > len(R_POOL):
            raise ValueError("variable pool is limited to four of each kind")

    def to_json(self):
        return {"calculus": self.calculus, "max_cxty": self.max_cxty,
                "n_lvars": self.n_lvars, "n_rvars": self.n_rvars,
                "typed_only": self.typed_only, "atoms": list(self.atoms),
                "max_type_lg": self.max_type_lg}


# ---------------------------------------------------------------------------
# Lambda-mu terms.

@lru_cache(maxsize=None)
def _lmu_terms(size: int, dl: int, dr: int, nl: int, nr: int) -> tuple:
    if size < 1:
        return ()
    if size == 1:
        names = L_POOL[:nl] + tuple(f"z{i}" for i in range(1, dl + 1))
        return tuple(lmu.Var(n) for n in names)
    out = []
    for body in _lmu_terms(size - 1, dl + 1, dr, nl, nr):
        out.append(lmu.Abs(f"z{dl + 1}", body))
    for body in _lmu_terms(size - 1, dl, dr + 1, nl, nr):
        out.append(lmu.Mu(f"@c{dr + 1}", body))
    heads = R_POOL[:nr] + tuple(f"@c{i}" for i in range(1, dr + 1))
    for head in heads:
        for body in _lmu_terms(size - 1, dl, dr, nl, nr):
            out.append(lmu.Named(head, body))
    for left in range(1, size - 1):
        for f in _lmu_terms(left, dl, dr, nl, nr):
            for a in _lmu_terms(size - 1 - left, dl, dr, nl, nr):
                out.append(lmu.App(f, a))
    return tuple(out)


# ---------------------------------------------------------------------------
# Sequent-calculus terms.  ``kind`` is "c", "l", or "r".

@lru_cache(maxsize=None)
def _lbar_terms(kind: str, size: int, dl: int, dr: int, nl: int, nr: int,
                restricted: bool) -> tuple:
    if size < 1:
        return ()
    out = []
    if kind == "c":
        if size >= 3:
            for left in range(1, size - 1):
                for l in _lbar_terms("l", left, dl, dr, nl, nr, restricted):
                    for r in _lbar_terms("r", size - 1 - left, dl, dr, nl, nr,
                                         restricted):
                        out.append(lbar.Command(l, r))
        return tuple(out)
    if kind == "l":
        if size == 1:
            names = L_POOL[:nl] + tuple(f"z{i}" for i in range(1, dl + 1))
            return tuple(lbar.LVar(n) for n in names)
        for c in _lbar_terms("c", size - 1, dl, dr + 1, nl, nr, restricted):
            out.append(lbar.LMu(f"@c{dr + 1}", c))
        if not restricted:
            for body in _lbar_terms("l", size - 1, dl + 1, dr, nl, nr, restricted):
                out.append(lbar.LAbs(f"z{dl + 1}", body))
            for left in range(1, size - 1):
                for h in _lbar_terms("r", left, dl, dr, nl, nr, restricted):
                    for t in _lbar_terms("l", size - 1 - left, dl, dr, nl, nr,
                                         restricted):
                        out.append(lbar.RConsL(h, t))
        return tuple(out)
    # kind == "r"
    if size == 1:
        names = R_POOL[:nr] + tuple(f"@c{i}" for i in range(1, dr + 1))
        return tuple(lbar.RVar(n) for n in names)
    for c in _lbar_terms("c", size - 1, dl + 1, dr, nl, nr, restricted):
        out.append(lbar.RMu(f"z{dl + 1}", c))
    if not restricted:
        for body in _lbar_terms("r", size - 1, dl, dr + 1, nl, nr, restricted):
            out.append(lbar.RAbs(f"@c{dr + 1}", body))
        for left in range(1, size - 1):
            for h in _lbar_terms("l", left, dl, dr, nl, nr, restricted):
                for t in _lbar_terms("r", size - 1 - left, dl, dr, nl, nr,
                                     restricted):
                    out.append(lbar.LConsR(h, t))
    return tuple(out)


def enumerate_terms(spec: EnumSpec) -> Iterator:
    """Stream every term of the selected grammar up to the size bound,
    each alpha class exactly once, smallest first."""
    typed_filter = None
    if spec.typed_only:
        pool = annotation_types(spec.atoms, spec.max_type_lg, spec.calculus)

        def typed_filter(term):
            return is_typable(term, pool)

    for size in range(1, spec.max_cxty + 1):
        if spec.calculus == "lmu":
            batch = _lmu_terms(size, 0, 0, spec.n_lvars, spec.n_rvars)
        else:
            restricted = spec.calculus == "lbar-restricted"
            batch = itertools.chain(
                _lbar_terms("c", size, 0, 0, spec.n_lvars, spec.n_rvars, restricted),
                _lbar_terms("l", size, 0, 0, spec.n_lvars, spec.n_rvars, restricted),
                _lbar_terms("r", size, 0, 0, spec.n_lvars, spec.n_rvars, restricted))
        for term in batch:
            if typed_filter is None or typed_filter(term):
                yield term


def count_terms(spec: EnumSpec) -> dict[int, int]:
    """Number of enumerated terms per size."""
    counts: dict[int, int] = {}
    for t in enumerate_terms(spec):
        size = (lmu if spec.calculus == "lmu" else lbar).cxty(t)
        counts[size] = counts.get(size, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Annotation enumeration.

def annotation_types(atoms, max_lg: int = 3, calculus: str = "lmu") -> tuple:
    """All types over the given atoms with size at most ``max_lg``.

    The lambda-mu grammar adds ``bot``; the sequent grammar adds the minus
    connective instead.
    """
    base = [ty.Atom(a) for a in atoms]
    if calculus == "lmu":
        base.append(ty.BOT)
    by_size: dict[int, list] = {1: base}
    for size in range(2, max_lg + 1):
        acc = []
        for left_size in range(1, size - 1):
            for a in by_size.get(left_size, ()):
                for b in by_size.get(size - 1 - left_size, ()):
                    acc.append(ty.Arrow(a, b))
                    if calculus != "lmu":
                        acc.append(ty.Minus(a, b))
        by_size[size] = acc
    return tuple(itertools.chain.from_iterable(
        by_size[s] for s in sorted(by_size)))


def _uniquify_lmu(t, counter, mapping):
    match t:
        case lmu.Var(n):
            return lmu.Var(mapping.get(n, n))
        case lmu.Abs(v, b, an):
            counter[0] += 1
            v2 = f"q{counter[0]}"
            return lmu.Abs(v2, _uniquify_lmu(b, counter, mapping | {v: v2}), an)
        case lmu.Mu(v, b, an):
            counter[0] += 1
            v2 = f"@q{counter[0]}"
            return lmu.Mu(v2, _uniquify_lmu(b, counter, mapping | {v: v2}), an)
        case lmu.Named(v, b):
            return lmu.Named(mapping.get(v, v), _uniquify_lmu(b, counter, mapping))
        case lmu.App(f, a):
            return lmu.App(_uniquify_lmu(f, counter, mapping),
                           _uniquify_lmu(a, counter, mapping))


def _uniquify_lbar(t, counter, mapping):
    match t:
        case lbar.LVar(n):
            return lbar.LVar(mapping.get(n, n))
        case lbar.RVar(n):
            return lbar.RVar(mapping.get(n, n))
        case lbar.LAbs(v, b, an) | lbar.RMu(v, b, an):
            counter[0] += 1
            v2 = f"q{counter[0]}"
            b2 = _uniquify_lbar(b, counter, mapping | {v: v2})
            return type(t)(v2, b2, an)
        case lbar.RAbs(v, b, an) | lbar.LMu(v, b, an):
            counter[0] += 1
            v2 = f"@q{counter[0]}"
            b2 = _uniquify_lbar(b, counter, mapping | {v: v2})
            return type(t)(v2, b2, an)
        case _:
            return lbar.with_children(
                t, tuple(_uniquify_lbar(c, counter, mapping)
                         for c in lbar.children(t)))


# Fast typability: the set of possible judgments per subterm, computed
# bottom-up and memoized.  A "typing" is (type, requirements), where the
# requirements map free variables to the context entries they force.
# Lambda-side entries and binder annotations range over the pool;
# mu-variable entries in the lambda-mu calculus are negations forced by
# use.  Enumerated terms share subterm structure heavily, so memoizing on
# the (hashable) terms makes the sweep-scale filter cheap.

def _merge(req1: tuple, req2: tuple) -> Optional[tuple]:
    merged = dict(req1)
    for name, entry in req2:
        if merged.setdefault(name, entry) != entry:
            return None
    return tuple(sorted(merged.items()))


def _drop(req: tuple, name: str):
    entry = None
    rest = []
    for n, e in req:
        if n == name:
            entry = e
        else:
            rest.append((n, e))
    return entry, tuple(rest)


@lru_cache(maxsize=None)
def _typings_lmu(term, pool) -> frozenset:
    out = set()
    match term:
        case lmu.Var(n):
            out.update((t, ((n, t),)) for t in pool)
        case lmu.Abs(v, b, _):
            for tb, req in _typings_lmu(b, pool):
                entry, rest = _drop(req, v)
                for ann in (pool if entry is None else (entry,)):
                    out.add((ty.Arrow(ann, tb), rest))
        case lmu.Mu(v, b, _):
            for tb, req in _typings_lmu(b, pool):
                if tb != ty.BOT:
                    continue
                entry, rest = _drop(req, v)
                if entry is None:
                    out.update((ann, rest) for ann in pool)
                elif ty.is_neg(entry) and entry.left in pool:
                    out.add((entry.left, rest))
        case lmu.Named(v, b):
            for tb, req in _typings_lmu(b, pool):
                merged = _merge(req, ((v, ty.neg(tb)),))
                if merged is not None:
                    out.add((ty.BOT, merged))
        case lmu.App(f, a):
            args = _typings_lmu(a, pool)
            for tf, rf in _typings_lmu(f, pool):
                if not isinstance(tf, ty.Arrow):
                    continue
                for ta, ra in args:
                    if ta == tf.left:
                        merged = _merge(rf, ra)
                        if merged is not None:
                            out.add((tf.right, merged))
    return frozenset(out)


@lru_cache(maxsize=None)
def _typings_lbar(term, pool) -> frozenset:
    """Typings (type, gamma requirements, delta requirements); commands
    carry type None."""
    out = set()
    match term:
        case lbar.LVar(n):
            out.update((t, ((n, t),), ()) for t in pool)
        case lbar.RVar(n):
            out.update((t, (), ((n, t),)) for t in pool)
        case lbar.Command(l, r):
            rights = _typings_lbar(r, pool)
            for tl, gl, dl in _typings_lbar(l, pool):
                for tr, gr, dr in rights:
                    if tl != tr:
                        continue
                    g = _merge(gl, gr)
                    d = _merge(dl, dr) if g is not None else None
                    if d is not None:
                        out.add((None, g, d))
        case lbar.LAbs(v, b, _):
            for tb, g, d in _typings_lbar(b, pool):
                entry, rest = _drop(g, v)
                for ann in (pool if entry is None else (entry,)):
                    out.add((ty.Arrow(ann, tb), rest, d))
        case lbar.RAbs(v, b, _):
            for tb, g, d in _typings_lbar(b, pool):
                entry, rest = _drop(d, v)
                for ann in (pool if entry is None else (entry,)):
                    out.add((ty.Minus(tb, ann), g, rest))
        case lbar.LMu(v, b, _):
            for _none, g, d in _typings_lbar(b, pool):
                entry, rest = _drop(d, v)
                for ann in (pool if entry is None else (entry,)):
                    out.add((ann, g, rest))
        case lbar.RMu(v, b, _):
            for _none, g, d in _typings_lbar(b, pool):
                entry, rest = _drop(g, v)
                for ann in (pool if entry is None else (entry,)):
                    out.add((ann, rest, d))
        case lbar.LConsR(h, tl):
            tails = _typings_lbar(tl, pool)
            for th, gh, dh in _typings_lbar(h, pool):
                for tt, gt, dt in tails:
                    g = _merge(gh, gt)
                    d = _merge(dh, dt) if g is not None else None
                    if d is not None:
                        out.add((ty.Arrow(th, tt), g, d))
        case lbar.RConsL(h, tl):
            tails = _typings_lbar(tl, pool)
            for th, gh, dh in _typings_lbar(h, pool):
                for tt, gt, dt in tails:
                    g = _merge(gh, gt)
                    d = _merge(dh, dt) if g is not None else None
                    if d is not None:
                        out.add((ty.Minus(tt, th), g, d))
    return frozenset(out)


def is_typable(term, pool) -> bool:
    """Whether some annotation assignment over the pool typechecks."""
    pool = tuple(pool)
    if isinstance(term, lmu.LmuTerm):
        return bool(_typings_lmu(term, pool))
    return bool(_typings_lbar(term, pool))


# Typed instances: a term plus an annotation assignment and a context under
# which it typechecks.  The search synthesizes types bottom-up, choosing
# binder annotations and free-variable context entries from the pool and
# pruning as soon as a rule cannot apply.

@dataclass(frozen=True)
class TypedInstance:
    term: object                      # annotated term
    gamma: dict = field(hash=False, compare=False, default_factory=dict)
    delta: dict = field(hash=False, compare=False, default_factory=dict)
    type_: Optional[ty.TypeExpr] = None


def typed_instances(term, pool, base_gamma=None, base_delta=None
                    ) -> Iterator[TypedInstance]:
    """All ways to annotate a term so it typechecks.

    ``pool`` bounds binder annotations and lambda-side context entries.
    Mu-variable entries in the lambda-mu calculus are negations forced by
    use, so they may fall outside the pool.  ``base_gamma``/``base_delta``
    pin context entries in advance (for the lambda-mu calculus only
    ``base_gamma`` is read, holding both kinds of names).
    """
    if isinstance(term, lmu.LmuTerm):
        u = _uniquify_lmu(term, [0], {})
        free = set().union(*lmu.free_vars(term)) | set(base_gamma or {})
        for annotated, ctx, tt in _inst_lmu(u, dict(base_gamma or {}), pool):
            kept = {k: v for k, v in ctx.items() if k in free}
            yield TypedInstance(annotated, kept, {}, tt)
        return
    u = _uniquify_lbar(term, [0], {})
    fl, fr = lbar.free_vars(term)
    fl, fr = fl | set(base_gamma or {}), fr | set(base_delta or {})
    for annotated, g, d, tt in _inst_lbar(
            u, dict(base_gamma or {}), dict(base_delta or {}), pool):
        yield TypedInstance(annotated,
                            {k: v for k, v in g.items() if k in fl},
                            {k: v for k, v in d.items() if k in fr}, tt)


def first_typed_instance(term, pool, base_gamma=None, base_delta=None
                         ) -> Optional[TypedInstance]:
    return next(typed_instances(term, pool, base_gamma, base_delta), None)


def _inst_lmu(m, ctx, pool):
    match m:
        case lmu.Var(n):
            if n in ctx:
                yield m, ctx, ctx[n]
            else:
                for t in pool:
                    yield m, ctx | {n: t}, t
        case lmu.Abs(v, b, _):
            for ann in pool:
                for b2, ctx2, tb in _inst_lmu(b, ctx | {v: ann}, pool):
                    yield lmu.Abs(v, b2, ann), ctx2, ty.Arrow(ann, tb)
        case lmu.Mu(v, b, _):
            for ann in pool:
                for b2, ctx2, tb in _inst_lmu(b, ctx | {v: ty.neg(ann)}, pool):
                    if tb == ty.BOT:
                        yield lmu.Mu(v, b2, ann), ctx2, ann
        case lmu.Named(v, b):
            for b2, ctx2, tb in _inst_lmu(b, ctx, pool):
                want = ty.neg(tb)
                if v in ctx2:
                    if ctx2[v] == want:
                        yield lmu.Named(v, b2), ctx2, ty.BOT
                else:
                    yield lmu.Named(v, b2), ctx2 | {v: want}, ty.BOT
        case lmu.App(f, a):
            for f2, ctx1, tf in _inst_lmu(f, ctx, pool):
                if isinstance(tf, ty.Arrow):
                    for a2, ctx2, ta in _inst_lmu(a, ctx1, pool):
                        if ta == tf.left:
                            yield lmu.App(f2, a2), ctx2, tf.right


def _inst_lbar(t, gamma, delta, pool):
    match t:
        case lbar.LVar(n):
            if n in gamma:
                yield t, gamma, delta, gamma[n]
            else:
                for tt in pool:
                    yield t, gamma | {n: tt}, delta, tt
        case lbar.RVar(n):
            if n in delta:
                yield t, gamma, delta, delta[n]
            else:
                for tt in pool:
                    yield t, gamma, delta | {n: tt}, tt
        case lbar.Command(l, r):
            for l2, g1, d1, tl in _inst_lbar(l, gamma, delta, pool):
                for r2, g2, d2, tr in _inst_lbar(r, g1, d1, pool):
                    if tl == tr:
                        yield lbar.Command(l2, r2), g2, d2, None
        case lbar.LAbs(v, b, _):
            for ann in pool:
                for b2, g2, d2, tb in _inst_lbar(b, gamma | {v: ann}, delta, pool):
                    yield lbar.LAbs(v, b2, ann), g2, d2, ty.Arrow(ann, tb)
        case lbar.RAbs(v, b, _):
            for ann in pool:
                for b2, g2, d2, tb in _inst_lbar(b, gamma, delta | {v: ann}, pool):
                    yield lbar.RAbs(v, b2, ann), g2, d2, ty.Minus(tb, ann)
        case lbar.LMu(v, b, _):
            for ann in pool:
                for b2, g2, d2, _n in _inst_lbar(b, gamma, delta | {v: ann}, pool):
                    yield lbar.LMu(v, b2, ann), g2, d2, ann
        case lbar.RMu(v, b, _):
            for ann in pool:
                for b2, g2, d2, _n in _inst_lbar(b, gamma | {v: ann}, delta, pool):
                    yield lbar.RMu(v, b2, ann), g2, d2, ann
        case lbar.LConsR(h, tl):
            for h2, g1, d1, th in _inst_lbar(h, gamma, delta, pool):
                for t2, g2, d2, tt in _inst_lbar(tl, g1, d1, pool):
                    yield lbar.LConsR(h2, t2), g2, d2, ty.Arrow(th, tt)
        case lbar.RConsL(h, tl):
            for h2, g1, d1, th in _inst_lbar(h, gamma, delta, pool):
                for t2, g2, d2, tt in _inst_lbar(tl, g1, d1, pool):
                    yield lbar.RConsL(h2, t2), g2, d2, ty.Minus(tt, th)
