"""Terms of the two-sided sequent calculus: representation, parsing,
printing, measures, and capture-avoiding substitution.

There are three syntactic categories.  A command pairs a left term against
a right term; left terms and right terms are dual, each with variables,
lambda abstractions, mu binders (binding a variable of the *other* kind),
and a cons form combining a term of the other kind with one of its own.

Concrete syntax (ASCII):

    command:  < tl | tr >
    l-term:   x  |  \\x[:T]. tl  |  mu @a. command  |  tr :: tl  |  (tl)
    r-term:   @a |  \\@a[:T]. tr |  mu x. command   |  tl :: tr  |  (tr)

Left variables are lowercase identifiers, right variables carry an ``@``
prefix.  ``::`` is right associative.  The kind of a mu binder's variable
determines the sort of the mu term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .. import types as ty
from ..errors import ParseError, SortError

COMMAND = "command"
LTERM = "lterm"
RTERM = "rterm"


@dataclass(frozen=True)
class Command:
    """A pairing ``< tl | tr >`` of an l-term against an r-term."""
    left: "LbarTerm"
    right: "LbarTerm"
    sort = COMMAND

    def __post_init__(self):
        if sort_of(self.left) != LTERM:
            raise SortError("left side of a command must be an l-term", 0)
        if sort_of(self.right) != RTERM:
            raise SortError("right side of a command must be an r-term", 0)

    def __str__(self) -> str:
        return print_lbar(self)


@dataclass(frozen=True)
class LVar:
    name: str
    sort = LTERM

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class LAbs:
    """Lambda abstraction over an l-variable; the body is an l-term."""
    var: str
    body: "LbarTerm"
    annot: Optional[ty.TypeExpr] = None
    sort = LTERM

    def __post_init__(self):
        if sort_of(self.body) != LTERM:
            raise SortError("body of an l-abstraction must be an l-term", 0)

    def __str__(self) -> str:
        return print_lbar(self)


@dataclass(frozen=True)
class LMu:
    """``mu @a. c``: an l-term binding an r-variable in a command."""
    var: str
    body: Command
    annot: Optional[ty.TypeExpr] = None
    sort = LTERM

    def __post_init__(self):
        if not self.var.startswith("@"):
            raise SortError("an l-term mu must bind an r-variable", 0)
        if sort_of(self.body) != COMMAND:
            raise SortError("body of a mu must be a command", 0)

    def __str__(self) -> str:
        return print_lbar(self)


@dataclass(frozen=True)
class RConsL:
    """``tr :: tl``: an l-term consing an r-term head onto an l-term tail."""
    head: "LbarTerm"
    tail: "LbarTerm"
    sort = LTERM

    def __post_init__(self):
        if sort_of(self.head) != RTERM or sort_of(self.tail) != LTERM:
            raise SortError("this cons needs an r-term head and an l-term tail", 0)

    def __str__(self) -> str:
        return print_lbar(self)


@dataclass(frozen=True)
class RVar:
    name: str
    sort = RTERM

    def __post_init__(self):
        if not self.name.startswith("@"):
            raise SortError("r-variable names carry an '@' prefix", 0)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class RAbs:
    """Lambda abstraction over an r-variable; the body is an r-term."""
    var: str
    body: "LbarTerm"
    annot: Optional[ty.TypeExpr] = None
    sort = RTERM

    def __post_init__(self):
        if not self.var.startswith("@"):
            raise SortError("an r-abstraction binds an r-variable", 0)
        if sort_of(self.body) != RTERM:
            raise SortError("body of an r-abstraction must be an r-term", 0)

    def __str__(self) -> str:
        return print_lbar(self)


@dataclass(frozen=True)
class RMu:
    """``mu x. c``: an r-term binding an l-variable in a command."""
    var: str
    body: Command
    annot: Optional[ty.TypeExpr] = None
    sort = RTERM

    def __post_init__(self):
        if self.var.startswith("@"):
            raise SortError("an r-term mu must bind an l-variable", 0)
        if sort_of(self.body) != COMMAND:
            raise SortError("body of a mu must be a command", 0)

    def __str__(self) -> str:
        return print_lbar(self)


@dataclass(frozen=True)
class LConsR:
    """``tl :: tr``: an r-term consing an l-term head onto an r-term tail."""
    head: "LbarTerm"
    tail: "LbarTerm"
    sort = RTERM

    def __post_init__(self):
        if sort_of(self.head) != LTERM or sort_of(self.tail) != RTERM:
            raise SortError("this cons needs an l-term head and an r-term tail", 0)

    def __str__(self) -> str:
        return print_lbar(self)


LbarTerm = Command | LVar | LAbs | LMu | RConsL | RVar | RAbs | RMu | LConsR

_SORTS = {LVar: LTERM, LAbs: LTERM, LMu: LTERM, RConsL: LTERM,
          RVar: RTERM, RAbs: RTERM, RMu: RTERM, LConsR: RTERM,
          Command: COMMAND}


def sort_of(t: LbarTerm) -> str:
    try:
        return _SORTS[type(t)]
    except KeyError:
        raise TypeError(f"not a term: {t!r}") from None


def is_proper(t: LbarTerm) -> bool:
    """A proper term is one that is not a variable."""
    return not isinstance(t, (LVar, RVar))


# ---------------------------------------------------------------------------
# Structure helpers: children are indexed positions used everywhere
# (redexes, graphs, traces).  Command: 0=left, 1=right; binders: 0=body;
# cons: 0=head, 1=tail.

def children(t: LbarTerm) -> tuple:
    match t:
        case Command(l, r):
            return (l, r)
        case LAbs(_, b, _) | LMu(_, b, _) | RAbs(_, b, _) | RMu(_, b, _):
            return (b,)
        case RConsL(h, tl) | LConsR(h, tl):
            return (h, tl)
        case _:
            return ()


def with_children(t: LbarTerm, kids: tuple) -> LbarTerm:
    match t:
        case Command(_, _):
            return Command(*kids)
        case LAbs(v, _, a):
            return LAbs(v, kids[0], a)
        case LMu(v, _, a):
            return LMu(v, kids[0], a)
        case RAbs(v, _, a):
            return RAbs(v, kids[0], a)
        case RMu(v, _, a):
            return RMu(v, kids[0], a)
        case RConsL(_, _):
            return RConsL(*kids)
        case LConsR(_, _):
            return LConsR(*kids)
    raise TypeError(f"node has no children: {t!r}")


def subterm_at(t: LbarTerm, position) -> LbarTerm:
    for i in position:
        kids = children(t)
        if i >= len(kids):
            raise IndexError(f"no child {i} at {t!r}")
        t = kids[i]
    return t


def replace_at(t: LbarTerm, position, sub: LbarTerm) -> LbarTerm:
    if not position:
        return sub
    i, rest = position[0], position[1:]
    kids = list(children(t))
    kids[i] = replace_at(kids[i], rest, sub)
    return with_children(t, tuple(kids))


def subterms(t: LbarTerm) -> Iterator[tuple[tuple, LbarTerm]]:
    """All (position, subterm) pairs in preorder."""
    stack = [((), t)]
    while stack:
        pos, node = stack.pop()
        yield pos, node
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((pos + (i,), kids[i]))


# ---------------------------------------------------------------------------
# Measures and variable bookkeeping.

def cxty(t: LbarTerm) -> int:
    """Term size: total number of AST nodes (annotations do not count)."""
    return 1 + sum(cxty(c) for c in children(t))


def free_vars(t: LbarTerm) -> tuple[frozenset[str], frozenset[str]]:
    """Free l-variable and r-variable names of a term."""
    lv: set[str] = set()
    rv: set[str] = set()
    _collect_free(t, frozenset(), frozenset(), lv, rv)
    return frozenset(lv), frozenset(rv)


def _collect_free(t, lbound, rbound, lv, rv):
    match t:
        case LVar(n):
            if n not in lbound:
                lv.add(n)
        case RVar(n):
            if n not in rbound:
                rv.add(n)
        case LAbs(v, b, _):
            _collect_free(b, lbound | {v}, rbound, lv, rv)
        case RMu(v, b, _):
            _collect_free(b, lbound | {v}, rbound, lv, rv)
        case RAbs(v, b, _):
            _collect_free(b, lbound, rbound | {v}, lv, rv)
        case LMu(v, b, _):
            _collect_free(b, lbound, rbound | {v}, lv, rv)
        case _:
            for c in children(t):
                _collect_free(c, lbound, rbound, lv, rv)


def occurrences(t: LbarTerm, name: str) -> int:
    """Number of free occurrences of a variable (of either kind) in t."""
    is_r = name.startswith("@")
    match t:
        case LVar(n):
            return 1 if not is_r and n == name else 0
        case RVar(n):
            return 1 if is_r and n == name else 0
        case (LAbs(v, b, _) | RMu(v, b, _)) if not is_r:
            return 0 if v == name else occurrences(b, name)
        case (RAbs(v, b, _) | LMu(v, b, _)) if is_r:
            return 0 if v == name else occurrences(b, name)
        case _:
            return sum(occurrences(c, name) for c in children(t))


def free_occurrence_positions(t: LbarTerm, name: str) -> list[tuple]:
    """Positions of the free occurrences of a variable, in preorder."""
    out: list[tuple] = []
    _occ_pos(t, name, name.startswith("@"), (), out)
    return out


def _occ_pos(t, name, is_r, pos, out):
    match t:
        case LVar(n):
            if not is_r and n == name:
                out.append(pos)
        case RVar(n):
            if is_r and n == name:
                out.append(pos)
        case (LAbs(v, b, _) | RMu(v, b, _)) if not is_r:
            if v != name:
                _occ_pos(b, name, is_r, pos + (0,), out)
        case (RAbs(v, b, _) | LMu(v, b, _)) if is_r:
            if v != name:
                _occ_pos(b, name, is_r, pos + (0,), out)
        case _:
            for i, c in enumerate(children(t)):
                _occ_pos(c, name, is_r, pos + (i,), out)


def fresh_name(base: str, avoid) -> str:
    """Smallest numbered variant of ``base`` not in ``avoid``."""
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def strip_annotations(t: LbarTerm) -> LbarTerm:
    match t:
        case LAbs(v, b, _):
            return LAbs(v, strip_annotations(b))
        case LMu(v, b, _):
            return LMu(v, strip_annotations(b))
        case RAbs(v, b, _):
            return RAbs(v, strip_annotations(b))
        case RMu(v, b, _):
            return RMu(v, strip_annotations(b))
        case LVar(_) | RVar(_):
            return t
        case _:
            return with_children(t, tuple(strip_annotations(c) for c in children(t)))


# ---------------------------------------------------------------------------
# Substitution.  Both public entry points are simultaneous underneath; the
# walker renames binders that would capture free variables of the images.

def subst_l(t: LbarTerm, var: str, value: LbarTerm) -> LbarTerm:
    """Capture-avoiding replacement of the free l-variable ``var``."""
    if sort_of(value) != LTERM:
        raise SortError("substituted value for an l-variable must be an l-term", 0)
    return subst_many(t, {var: value})


def subst_r(t: LbarTerm, var: str, value: LbarTerm) -> LbarTerm:
    """Capture-avoiding replacement of the free r-variable ``var``."""
    if not var.startswith("@"):
        raise SortError("subst_r substitutes an r-variable", 0)
    if sort_of(value) != RTERM:
        raise SortError("substituted value for an r-variable must be an r-term", 0)
    return subst_many(t, {var: value})


def subst_many(t: LbarTerm, bindings: dict[str, LbarTerm]) -> LbarTerm:
    """Simultaneous capture-avoiding substitution.

    Keys are variable names (r-variables with their ``@`` prefix); each image
    must have the sort its key dictates.
    """
    lmap = {}
    rmap = {}
    for k, v in bindings.items():
        if k.startswith("@"):
            if sort_of(v) != RTERM:
                raise SortError(f"image of {k} must be an r-term", 0)
            rmap[k] = v
        else:
            if sort_of(v) != LTERM:
                raise SortError(f"image of {k} must be an l-term", 0)
            lmap[k] = v
    if not lmap and not rmap:
        return t
    avoid_l: set[str] = set()
    avoid_r: set[str] = set()
    for v in list(lmap.values()) + list(rmap.values()):
        fl, fr = free_vars(v)
        avoid_l |= fl
        avoid_r |= fr
    return _subst(t, lmap, rmap, frozenset(avoid_l), frozenset(avoid_r))


def _subst(t, lmap, rmap, avoid_l, avoid_r):
    match t:
        case LVar(n):
            return lmap.get(n, t)
        case RVar(n):
            return rmap.get(n, t)
        case LAbs(v, b, an):
            v, b, lmap2 = _enter_lbinder(v, b, lmap, rmap, avoid_l)
            if not lmap2 and not rmap:
                return LAbs(v, b, an)
            return LAbs(v, _subst(b, lmap2, rmap, avoid_l, avoid_r), an)
        case RMu(v, b, an):
            v, b, lmap2 = _enter_lbinder(v, b, lmap, rmap, avoid_l)
            if not lmap2 and not rmap:
                return RMu(v, b, an)
            return RMu(v, _subst(b, lmap2, rmap, avoid_l, avoid_r), an)
        case RAbs(v, b, an):
            v, b, rmap2 = _enter_rbinder(v, b, rmap, lmap, avoid_r)
            if not lmap and not rmap2:
                return RAbs(v, b, an)
            return RAbs(v, _subst(b, lmap, rmap2, avoid_l, avoid_r), an)
        case LMu(v, b, an):
            v, b, rmap2 = _enter_rbinder(v, b, rmap, lmap, avoid_r)
            if not lmap and not rmap2:
                return LMu(v, b, an)
            return LMu(v, _subst(b, lmap, rmap2, avoid_l, avoid_r), an)
        case _:
            return with_children(
                t, tuple(_subst(c, lmap, rmap, avoid_l, avoid_r) for c in children(t)))


def _enter_lbinder(v, body, lmap, other_map, avoid):
    lmap2 = {k: u for k, u in lmap.items() if k != v}
    if (lmap2 or other_map) and v in avoid:
        fl, _ = free_vars(body)
        v2 = fresh_name(v, avoid | fl | set(lmap2))
        return v2, subst_many(body, {v: LVar(v2)}), lmap2
    return v, body, lmap2


def _enter_rbinder(v, body, rmap, other_map, avoid):
    rmap2 = {k: u for k, u in rmap.items() if k != v}
    if (rmap2 or other_map) and v in avoid:
        _, fr = free_vars(body)
        v2 = fresh_name(v, avoid | fr | set(rmap2))
        return v2, subst_many(body, {v: RVar(v2)}), rmap2
    return v, body, rmap2


# ---------------------------------------------------------------------------
# Alpha equivalence via a nameless canonical form: bound variables become
# indices into per-kind binder stacks, free variables stay by name.

def canonical(t: LbarTerm):
    """Hashable nameless form; equal up to consistent bound renaming."""
    return _canon(t, (), ())


def _canon(t, lstack, rstack):
    match t:
        case LVar(n):
            return ("lb", lstack.index(n)) if n in lstack else ("lf", n)
        case RVar(n):
            return ("rb", rstack.index(n)) if n in rstack else ("rf", n)
        case Command(l, r):
            return ("cmd", _canon(l, lstack, rstack), _canon(r, lstack, rstack))
        case LAbs(v, b, an):
            return ("labs", an, _canon(b, (v,) + lstack, rstack))
        case RMu(v, b, an):
            return ("rmu", an, _canon(b, (v,) + lstack, rstack))
        case RAbs(v, b, an):
            return ("rabs", an, _canon(b, lstack, (v,) + rstack))
        case LMu(v, b, an):
            return ("lmu", an, _canon(b, lstack, (v,) + rstack))
        case RConsL(h, tl):
            return ("rcons", _canon(h, lstack, rstack), _canon(tl, lstack, rstack))
        case LConsR(h, tl):
            return ("lcons", _canon(h, lstack, rstack), _canon(tl, lstack, rstack))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: LbarTerm, b: LbarTerm) -> bool:
    """Equality up to consistent renaming of bound variables."""
    if sort_of(a) != sort_of(b):
        raise SortError("alpha_eq compares terms of the same sort", 0)
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# JSON AST export: tagged nodes {"tag": ..., "children": [...]}.

_TAGS = {Command: "command", LVar: "lvar", LAbs: "labs", LMu: "lmu",
         RConsL: "rconsl", RVar: "rvar", RAbs: "rabs", RMu: "rmu",
         LConsR: "lconsr"}


def to_json(t: LbarTerm):
    node = {"tag": _TAGS[type(t)]}
    match t:
        case LVar(n) | RVar(n):
            node["name"] = n
            return node
        case LAbs(v, _, an) | LMu(v, _, an) | RAbs(v, _, an) | RMu(v, _, an):
            node["var"] = v
            node["annot"] = ty.type_to_json(an) if an is not None else None
    node["children"] = [to_json(c) for c in children(t)]
    return node


def from_json(obj) -> LbarTerm:
    tag = obj["tag"]
    if tag == "lvar":
        return LVar(obj["name"])
    if tag == "rvar":
        return RVar(obj["name"])
    kids = [from_json(c) for c in obj.get("children", [])]
    annot = obj.get("annot")
    annot = ty.type_from_json(annot) if annot is not None else None
    match tag:
        case "command":
            return Command(*kids)
        case "labs":
            return LAbs(obj["var"], kids[0], annot)
        case "lmu":
            return LMu(obj["var"], kids[0], annot)
        case "rabs":
            return RAbs(obj["var"], kids[0], annot)
        case "rmu":
            return RMu(obj["var"], kids[0], annot)
        case "rconsl":
            return RConsL(*kids)
        case "lconsr":
            return LConsR(*kids)
    raise ValueError(f"unknown term tag {tag!r}")


# ---------------------------------------------------------------------------
# Printing.  Commands and variables never need parentheses; a cons head is
# parenthesized when it is itself a cons, lambda, or mu (bodies and cons
# tails extend maximally to the right).

def print_lbar(t: LbarTerm) -> str:
    match t:
        case Command(l, r):
            return f"< {print_lbar(l)} | {print_lbar(r)} >"
        case LVar(n) | RVar(n):
            return n
        case LAbs(v, b, an) | RAbs(v, b, an):
            suffix = f":{ty.type_to_str(an)}" if an is not None else ""
            return f"\\{v}{suffix}. {print_lbar(b)}"
        case LMu(v, b, an) | RMu(v, b, an):
            suffix = f":{ty.type_to_str(an)}" if an is not None else ""
            return f"mu {v}{suffix}. {print_lbar(b)}"
        case RConsL(h, tl) | LConsR(h, tl):
            head = print_lbar(h)
            if isinstance(h, (RConsL, LConsR, LAbs, RAbs, LMu, RMu)):
                head = f"({head})"
            return f"{head} :: {print_lbar(tl)}"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Parsing: recursive descent over a simple tokenizer.

_PUNCT = ("::", "<", ">", "|", "\\", ".", "(", ")", ":")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        two = text[pos:pos + 2]
        if two == "::":
            toks.append(("::", "::", pos))
            pos += 2
            continue
        if two == "->":
            toks.append(("->", "->", pos))
            pos += 2
            continue
        if ch in "<>|\\.():-":
            toks.append((ch, ch, pos))
            pos += 1
            continue
        if ch == "@":
            if pos + 1 >= n or not text[pos + 1].islower():
                raise ParseError("'@' must start an r-variable", pos)
            end = pos + 1
            while _is_word(text, end):
                end += 1
            toks.append(("rvar", text[pos:end], pos))
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
            kind = {"mu": "mu", "bot": "bot"}.get(word, "lvar")
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

    def parse_any(self) -> LbarTerm:
        if self.peek()[0] == "<":
            return self.parse_command()
        return self.parse_term()

    def parse_command(self) -> Command:
        self.expect("<")
        lpos = self.peek()[2]
        left = self.parse_term()
        if sort_of(left) != LTERM:
            raise SortError("left side of a command must be an l-term", lpos)
        self.expect("|")
        rpos = self.peek()[2]
        right = self.parse_term()
        if sort_of(right) != RTERM:
            raise SortError("right side of a command must be an r-term", rpos)
        self.expect(">")
        return Command(left, right)

    def parse_term(self) -> LbarTerm:
        items = [(self.peek()[2], self.parse_primary())]
        while self.peek()[0] == "::":
            self.next()
            items.append((self.peek()[2], self.parse_primary()))
        # right-associative fold
        pos, term = items[-1]
        for hpos, head in reversed(items[:-1]):
            hs, ts = sort_of(head), sort_of(term)
            if hs == RTERM and ts == LTERM:
                term = RConsL(head, term)
            elif hs == LTERM and ts == RTERM:
                term = LConsR(head, term)
            else:
                raise SortError("cons combines terms of opposite kinds", hpos)
        return term

    def parse_primary(self) -> LbarTerm:
        kind, text, pos = self.next()
        if kind == "lvar":
            return LVar(text)
        if kind == "rvar":
            return RVar(text)
        if kind == "(":
            term = self.parse_term()
            self.expect(")")
            return term
        if kind == "\\":
            vkind, vname, vpos = self.next()
            if vkind not in ("lvar", "rvar"):
                raise ParseError("expected a variable after '\\'", vpos)
            annot = self.parse_annotation()
            self.expect(".")
            bpos = self.peek()[2]
            body = self.parse_term()
            if vkind == "lvar":
                if sort_of(body) != LTERM:
                    raise SortError("body of an l-abstraction must be an l-term", bpos)
                return LAbs(vname, body, annot)
            if sort_of(body) != RTERM:
                raise SortError("body of an r-abstraction must be an r-term", bpos)
            return RAbs(vname, body, annot)
        if kind == "mu":
            vkind, vname, vpos = self.next()
            if vkind not in ("lvar", "rvar"):
                raise ParseError("expected a variable after 'mu'", vpos)
            annot = self.parse_annotation()
            self.expect(".")
            body = self.parse_command()
            if vkind == "rvar":
                return LMu(vname, body, annot)
            return RMu(vname, body, annot)
        raise ParseError(f"unexpected token {text!r}", pos)

    def parse_annotation(self) -> Optional[ty.TypeExpr]:
        if self.peek()[0] != ":":
            return None
        colon = self.next()
        annot, end = ty.parse_type_prefix(self.text, colon[2] + 1)
        # resynchronize the token stream past the type text
        while self.toks[self.i][2] < end:
            self.i += 1
        return annot


def parse_lbar(text: str, expected_sort: Optional[str] = None) -> LbarTerm:
    """Parse a term; check it against ``expected_sort`` when given."""
    p = _Parser(text)
    term = p.parse_any()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    if expected_sort is not None and sort_of(term) != expected_sort:
        raise SortError(
            f"expected a {expected_sort}, parsed a {sort_of(term)}", 0)
    return term
