"""Terms of the symmetric lambda-mu calculus: representation, parsing,
printing, the four substitutions, and application-spine addresses.

Grammar (liberal form: a mu binder need not be followed by a named term):

    M ::= x  |  \\x[:T]. M  |  (M M)  |  mu @a[:T]. M  |  [@a] M

Application is written with mandatory parentheses; ``(a b c)`` folds left.
A prefix form (lambda, mu, ``[@a]``) takes exactly one term as its body,
so ``(mu @a. x  mu @b. y)`` is the application of two mu terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .. import types as ty
from ..errors import AddressError, ParseError


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Abs:
    var: str
    body: "LmuTerm"
    annot: Optional[ty.TypeExpr] = None

    def __str__(self) -> str:
        return print_lmu(self)


@dataclass(frozen=True)
class App:
    fun: "LmuTerm"
    arg: "LmuTerm"

    def __str__(self) -> str:
        return print_lmu(self)


@dataclass(frozen=True)
class Mu:
    """``mu @a. M``: binds the mu-variable ``@a`` in M."""
    var: str
    body: "LmuTerm"
    annot: Optional[ty.TypeExpr] = None

    def __post_init__(self):
        if not self.var.startswith("@"):
            raise ValueError("mu binds an '@'-prefixed mu-variable")

    def __str__(self) -> str:
        return print_lmu(self)


@dataclass(frozen=True)
class Named:
    """``[@a] M``: the mu-variable ``@a`` applied to M."""
    var: str
    body: "LmuTerm"

    def __post_init__(self):
        if not self.var.startswith("@"):
            raise ValueError("a named term applies an '@'-prefixed mu-variable")

    def __str__(self) -> str:
        return print_lmu(self)


LmuTerm = Var | Abs | App | Mu | Named


def is_proper(t: LmuTerm) -> bool:
    return not isinstance(t, Var)


# ---------------------------------------------------------------------------
# Structure helpers.  Child indices: Abs/Mu/Named: 0=body; App: 0=fun, 1=arg.

def children(t: LmuTerm) -> tuple:
    match t:
        case App(f, a):
            return (f, a)
        case Abs(_, b, _) | Mu(_, b, _) | Named(_, b):
            return (b,)
        case _:
            return ()


def with_children(t: LmuTerm, kids: tuple) -> LmuTerm:
    match t:
        case App(_, _):
            return App(*kids)
        case Abs(v, _, an):
            return Abs(v, kids[0], an)
        case Mu(v, _, an):
            return Mu(v, kids[0], an)
        case Named(v, _):
            return Named(v, kids[0])
    raise TypeError(f"node has no children: {t!r}")


def subterm_at(t: LmuTerm, position) -> LmuTerm:
    for i in position:
        kids = children(t)
        if i >= len(kids):
            raise IndexError(f"no child {i} at {t!r}")
        t = kids[i]
    return t


def replace_at(t: LmuTerm, position, sub: LmuTerm) -> LmuTerm:
    if not position:
        return sub
    i, rest = position[0], position[1:]
    kids = list(children(t))
    kids[i] = replace_at(kids[i], rest, sub)
    return with_children(t, tuple(kids))


def subterms(t: LmuTerm) -> Iterator[tuple[tuple, LmuTerm]]:
    stack = [((), t)]
    while stack:
        pos, node = stack.pop()
        yield pos, node
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((pos + (i,), kids[i]))


def cxty(t: LmuTerm) -> int:
    """Term size: total number of AST nodes."""
    return 1 + sum(cxty(c) for c in children(t))


def free_vars(t: LmuTerm) -> tuple[frozenset[str], frozenset[str]]:
    """Free lambda-variable and mu-variable names of a term."""
    lv: set[str] = set()
    mv: set[str] = set()
    _collect_free(t, frozenset(), frozenset(), lv, mv)
    return frozenset(lv), frozenset(mv)


def _collect_free(t, lbound, mbound, lv, mv):
    match t:
        case Var(n):
            if n not in lbound:
                lv.add(n)
        case Abs(v, b, _):
            _collect_free(b, lbound | {v}, mbound, lv, mv)
        case Mu(v, b, _):
            _collect_free(b, lbound, mbound | {v}, lv, mv)
        case Named(v, b):
            if v not in mbound:
                mv.add(v)
            _collect_free(b, lbound, mbound, lv, mv)
        case App(f, a):
            _collect_free(f, lbound, mbound, lv, mv)
            _collect_free(a, lbound, mbound, lv, mv)


def fresh_name(base: str, avoid) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def strip_annotations(t: LmuTerm) -> LmuTerm:
    match t:
        case Var(_):
            return t
        case Abs(v, b, _):
            return Abs(v, strip_annotations(b))
        case Mu(v, b, _):
            return Mu(v, strip_annotations(b))
        case Named(v, b):
            return Named(v, strip_annotations(b))
        case App(f, a):
            return App(strip_annotations(f), strip_annotations(a))


# ---------------------------------------------------------------------------
# Substitutions.

def subst_beta(m: LmuTerm, var: str, value: LmuTerm) -> LmuTerm:
    """Capture-avoiding replacement of the free lambda-variable ``var``."""
    fl, fm = free_vars(value)
    return _beta(m, var, value, fl, fm)


def _beta(m, var, value, avoid_l, avoid_m):
    match m:
        case Var(n):
            return value if n == var else m
        case Abs(v, b, an):
            if v == var:
                return m
            if v in avoid_l:
                fl, _ = free_vars(b)
                v2 = fresh_name(v, avoid_l | fl | {var})
                b = subst_beta(b, v, Var(v2))
                v = v2
            return Abs(v, _beta(b, var, value, avoid_l, avoid_m), an)
        case Mu(v, b, an):
            if v in avoid_m:
                _, fm = free_vars(b)
                v2 = fresh_name(v, avoid_m | fm)
                b = rename_mu(b, v, v2)
                v = v2
            return Mu(v, _beta(b, var, value, avoid_l, avoid_m), an)
        case Named(v, b):
            return Named(v, _beta(b, var, value, avoid_l, avoid_m))
        case App(f, a):
            return App(_beta(f, var, value, avoid_l, avoid_m),
                       _beta(a, var, value, avoid_l, avoid_m))


def rename_mu(m: LmuTerm, old: str, new: str) -> LmuTerm:
    """Capture-avoiding renaming of the free mu-variable ``old`` to ``new``."""
    match m:
        case Var(_):
            return m
        case Abs(v, b, an):
            return Abs(v, rename_mu(b, old, new), an)
        case App(f, a):
            return App(rename_mu(f, old, new), rename_mu(a, old, new))
        case Mu(v, b, an):
            if v == old:
                return m
            if v == new:
                _, fm = free_vars(b)
                v2 = fresh_name(v, fm | {old, new})
                b = rename_mu(b, v, v2)
                v = v2
            return Mu(v, rename_mu(b, old, new), an)
        case Named(v, b):
            v2 = new if v == old else v
            return Named(v2, rename_mu(b, old, new))


def subst_mu_r(m: LmuTerm, var: str, value: LmuTerm) -> LmuTerm:
    """Wrap every named subterm ``[var] U`` as ``[var] (U value)``.

    The pass is inner first: a named body is rewritten before the node
    itself is wrapped, and mu rebinding of ``var`` shadows.
    """
    return _mu_subst(m, {var: ("r", value)})


def subst_mu_l(m: LmuTerm, var: str, value: LmuTerm) -> LmuTerm:
    """Mirror image of :func:`subst_mu_r`: wraps as ``[var] (value U)``."""
    return _mu_subst(m, {var: ("l", value)})


def mu_subst_many(m: LmuTerm, entries: dict[str, tuple]) -> LmuTerm:
    """Simultaneous mu-substitution.

    ``entries`` maps mu-variable names to ``("r", N)``, ``("l", N)`` or
    ``("addr", (address, M))`` descriptors, applied in one structural pass.
    """
    return _mu_subst(m, dict(entries))


def _entry_wrap(entry, body):
    kind = entry[0]
    if kind == "r":
        return App(body, entry[1])
    if kind == "l":
        return App(entry[1], body)
    addr, big = entry[1]
    return addr_set(big, addr, body)


def _entry_fvs(entry):
    if entry[0] in ("r", "l"):
        return free_vars(entry[1])
    return free_vars(entry[1][1])


def _mu_subst(m, entries):
    if not entries:
        return m
    avoid_l: set[str] = set()
    avoid_m: set[str] = set()
    for e in entries.values():
        fl, fm = _entry_fvs(e)
        avoid_l |= fl
        avoid_m |= fm
    return _mu_walk(m, entries, frozenset(avoid_l), frozenset(avoid_m))


def _mu_walk(m, entries, avoid_l, avoid_m):
    match m:
        case Var(_):
            return m
        case App(f, a):
            return App(_mu_walk(f, entries, avoid_l, avoid_m),
                       _mu_walk(a, entries, avoid_l, avoid_m))
        case Abs(v, b, an):
            if v in avoid_l:
                fl, _ = free_vars(b)
                v2 = fresh_name(v, avoid_l | fl)
                b = subst_beta(b, v, Var(v2))
                v = v2
            return Abs(v, _mu_walk(b, entries, avoid_l, avoid_m), an)
        case Mu(v, b, an):
            entries2 = {k: e for k, e in entries.items() if k != v}
            if not entries2:
                return Mu(v, b, an)
            if v in avoid_m:
                _, fm = free_vars(b)
                v2 = fresh_name(v, avoid_m | fm | set(entries2))
                b = rename_mu(b, v, v2)
                v = v2
            return Mu(v, _mu_walk(b, entries2, avoid_l, avoid_m), an)
        case Named(v, b):
            b2 = _mu_walk(b, entries, avoid_l, avoid_m)
            if v in entries:
                return Named(v, _entry_wrap(entries[v], b2))
            return Named(v, b2)


# ---------------------------------------------------------------------------
# Addresses: paths over {l, r} descending application spines only.  The
# empty address denotes the whole term.

def addr_get(m: LmuTerm, address) -> Optional[LmuTerm]:
    """Subterm at an application-spine address, or None when undefined."""
    for step in address:
        if not isinstance(m, App):
            return None
        if step == "l":
            m = m.fun
        elif step == "r":
            m = m.arg
        else:
            raise ValueError(f"address steps are 'l' or 'r', got {step!r}")
    return m


def addr_set(m: LmuTerm, address, value: LmuTerm) -> LmuTerm:
    """Replace the subterm at an address (no binders are crossed)."""
    if not address:
        return value
    if not isinstance(m, App):
        raise AddressError(f"address {list(address)} undefined in {print_lmu(m)}")
    step, rest = address[0], address[1:]
    if step == "l":
        return App(addr_set(m.fun, rest, value), m.arg)
    if step == "r":
        return App(m.fun, addr_set(m.arg, rest, value))
    raise ValueError(f"address steps are 'l' or 'r', got {step!r}")


def valid_addresses(m: LmuTerm) -> list[tuple]:
    """All addresses defined in a term, shortest first."""
    out = [()]
    if isinstance(m, App):
        out.extend(("l",) + a for a in valid_addresses(m.fun))
        out.extend(("r",) + a for a in valid_addresses(m.arg))
        out.sort(key=lambda a: (len(a), a))
    return out


def subst_mu_addr(n: LmuTerm, var: str, address, m: LmuTerm) -> LmuTerm:
    """Wrap every named subterm ``[var] U`` as ``[var] M<address = U>``.

    Binders in ``n`` are renamed so free variables of ``m`` are never
    captured; rebinding of ``var`` shadows, as in the plain substitutions.
    """
    address = tuple(address)
    if addr_get(m, address) is None:
        raise AddressError(f"address {list(address)} undefined in {print_lmu(m)}")
    return _mu_subst(n, {var: ("addr", (address, m))})


def decompose_addr_subst(address, m: LmuTerm) -> list[tuple[str, LmuTerm]]:
    """Elementary substitution chain equivalent to an address substitution.

    Returns ``[(side, term), ...]`` applied innermost first: the result of
    folding ``subst_mu_r``/``subst_mu_l`` over the chain equals
    ``subst_mu_addr`` for every subject term.  At each step of the address
    the sibling of the descent becomes a wrap: descending right wraps the
    function side on the left, descending left wraps the argument side on
    the right.
    """
    address = tuple(address)
    chain: list[tuple[str, LmuTerm]] = []
    node = m
    for step in address:
        if not isinstance(node, App):
            raise AddressError(f"address {list(address)} undefined in {print_lmu(m)}")
        if step == "r":
            chain.append(("l", node.fun))
            node = node.arg
        elif step == "l":
            chain.append(("r", node.arg))
            node = node.fun
        else:
            raise ValueError(f"address steps are 'l' or 'r', got {step!r}")
    chain.reverse()
    return chain


def apply_mu_chain(n: LmuTerm, var: str, chain) -> LmuTerm:
    """Sequentially apply a chain of elementary mu-substitutions."""
    for side, term in chain:
        n = subst_mu_r(n, var, term) if side == "r" else subst_mu_l(n, var, term)
    return n


# ---------------------------------------------------------------------------
# Alpha equivalence via a nameless canonical form.

def canonical(t: LmuTerm):
    return _canon(t, (), ())


def _canon(t, lstack, mstack):
    match t:
        case Var(n):
            return ("lb", lstack.index(n)) if n in lstack else ("lf", n)
        case Abs(v, b, an):
            return ("abs", an, _canon(b, (v,) + lstack, mstack))
        case App(f, a):
            return ("app", _canon(f, lstack, mstack), _canon(a, lstack, mstack))
        case Mu(v, b, an):
            return ("mu", an, _canon(b, lstack, (v,) + mstack))
        case Named(v, b):
            head = ("mb", mstack.index(v)) if v in mstack else ("mf", v)
            return ("named", head, _canon(b, lstack, mstack))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: LmuTerm, b: LmuTerm) -> bool:
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# JSON AST export.

def to_json(t: LmuTerm):
    match t:
        case Var(n):
            return {"tag": "var", "name": n}
        case Abs(v, b, an):
            return {"tag": "abs", "var": v,
                    "annot": ty.type_to_json(an) if an is not None else None,
                    "children": [to_json(b)]}
        case App(f, a):
            return {"tag": "app", "children": [to_json(f), to_json(a)]}
        case Mu(v, b, an):
            return {"tag": "mu", "var": v,
                    "annot": ty.type_to_json(an) if an is not None else None,
                    "children": [to_json(b)]}
        case Named(v, b):
            return {"tag": "named", "var": v, "children": [to_json(b)]}
    raise TypeError(f"not a term: {t!r}")


def from_json(obj) -> LmuTerm:
    tag = obj["tag"]
    if tag == "var":
        return Var(obj["name"])
    kids = [from_json(c) for c in obj.get("children", [])]
    annot = obj.get("annot")
    annot = ty.type_from_json(annot) if annot is not None else None
    match tag:
        case "abs":
            return Abs(obj["var"], kids[0], annot)
        case "app":
            return App(*kids)
        case "mu":
            return Mu(obj["var"], kids[0], annot)
        case "named":
            return Named(obj["var"], kids[0])
    raise ValueError(f"unknown term tag {tag!r}")


# ---------------------------------------------------------------------------
# Printing and parsing.

def print_lmu(t: LmuTerm) -> str:
    match t:
        case Var(n):
            return n
        case Abs(v, b, an):
            suffix = f":{ty.type_to_str(an)}" if an is not None else ""
            return f"\\{v}{suffix}. {print_lmu(b)}"
        case App(f, a):
            return f"({print_lmu(f)} {print_lmu(a)})"
        case Mu(v, b, an):
            suffix = f":{ty.type_to_str(an)}" if an is not None else ""
            return f"mu {v}{suffix}. {print_lmu(b)}"
        case Named(v, b):
            return f"[{v}] {print_lmu(b)}"
    raise TypeError(f"not a term: {t!r}")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if text.startswith("->", pos):
            toks.append(("->", "->", pos))
            pos += 2
            continue
        if ch in "\\.()[]:-":
            toks.append((ch, ch, pos))
            pos += 1
            continue
        if ch == "@":
            if pos + 1 >= n or not text[pos + 1].islower():
                raise ParseError("'@' must start a mu-variable", pos)
            end = pos + 1
            while _is_word(text, end):
                end += 1
            toks.append(("mvar", text[pos:end], pos))
            pos = end
            continue
        if ch.isupper():
            # type atoms occur only inside annotations, which are re-read
            # from the raw text; lex them so the stream stays aligned
            end = pos
            while _is_word(text, end):
                end += 1
            toks.append(("capname", text[pos:end], pos))
            pos = end
            continue
        if ch.islower():
            end = pos
            while _is_word(text, end):
                end += 1
            word = text[pos:end]
            kind = {"mu": "mu", "bot": "bot"}.get(word, "var")
            toks.append((kind, word, pos))
            pos = end
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    toks.append(("eof", "", n))
    return toks


def _is_word(text: str, pos: int) -> bool:
    return pos < len(text) and (text[pos].isalnum() or text[pos] == "_")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse_term(self) -> LmuTerm:
        kind, text, pos = self.next()
        if kind == "var":
            return Var(text)
        if kind == "\\":
            tok = self.expect("var")
            annot = self.parse_annotation()
            self.expect(".")
            return Abs(tok[1], self.parse_term(), annot)
        if kind == "mu":
            tok = self.expect("mvar")
            annot = self.parse_annotation()
            self.expect(".")
            return Mu(tok[1], self.parse_term(), annot)
        if kind == "[":
            tok = self.expect("mvar")
            self.expect("]")
            return Named(tok[1], self.parse_term())
        if kind == "(":
            items = [self.parse_term()]
            while self.peek()[0] not in (")", "eof"):
                items.append(self.parse_term())
            close = self.expect(")")
            if len(items) < 2:
                raise ParseError("application needs at least two terms", close[2])
            term = items[0]
            for arg in items[1:]:
                term = App(term, arg)
            return term
        raise ParseError(f"unexpected token {text!r}", pos)

    def parse_annotation(self) -> Optional[ty.TypeExpr]:
        if self.peek()[0] != ":":
            return None
        colon = self.next()
        annot, end = ty.parse_type_prefix(self.text, colon[2] + 1)
        while self.toks[self.i][2] < end:
            self.i += 1
        return annot


def parse_lmu(text: str) -> LmuTerm:
    p = _Parser(text)
    term = p.parse_term()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    return term
