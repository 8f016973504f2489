"""Type expressions shared by the two calculi.

The sequent-style calculus uses atoms with the connectives ``->`` and ``-``
(read ``A - B`` as "A and not B").  The lambda-mu calculus uses atoms, the
constant ``bot``, and ``->``; a negation ``neg(A)`` abbreviates ``A -> bot``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Arrow:
    left: "TypeExpr"
    right: "TypeExpr"

    def __str__(self) -> str:
        return type_to_str(self)


@dataclass(frozen=True)
class Minus:
    left: "TypeExpr"
    right: "TypeExpr"

    def __str__(self) -> str:
        return type_to_str(self)


TypeExpr = Atom | Bottom | Arrow | Minus

BOT = Bottom()


def neg(a: TypeExpr) -> Arrow:
    """The negation abbreviation: ``neg(A) = A -> bot``."""
    return Arrow(a, BOT)


def is_neg(t: TypeExpr) -> bool:
    return isinstance(t, Arrow) and t.right == BOT


def lg(t: TypeExpr) -> int:
    """Size of a type: atoms and bot count 1, each connective 1 + operands."""
    match t:
        case Atom(_) | Bottom():
            return 1
        case Arrow(a, b) | Minus(a, b):
            return 1 + lg(a) + lg(b)
    raise TypeError(f"not a type: {t!r}")


# Precedence levels for printing: minus < arrow < atom.
_LEVEL = {Minus: 0, Arrow: 1, Atom: 2, Bottom: 2}


def type_to_str(t: TypeExpr) -> str:
    return _to_str(t, 0)


def _to_str(t: TypeExpr, min_level: int) -> str:
    match t:
        case Atom(name):
            return name
        case Bottom():
            return "bot"
        case Arrow(a, b):
            s = f"{_to_str(a, 2)} -> {_to_str(b, 1)}"
        case Minus(a, b):
            s = f"{_to_str(a, 1)} - {_to_str(b, 1)}"
        case _:
            raise TypeError(f"not a type: {t!r}")
    return f"({s})" if _LEVEL[type(t)] < min_level else s


def type_to_json(t: TypeExpr):
    match t:
        case Atom(name):
            return {"tag": "atom", "name": name}
        case Bottom():
            return {"tag": "bottom"}
        case Arrow(a, b):
            return {"tag": "arrow", "children": [type_to_json(a), type_to_json(b)]}
        case Minus(a, b):
            return {"tag": "minus", "children": [type_to_json(a), type_to_json(b)]}
    raise TypeError(f"not a type: {t!r}")


def type_from_json(obj) -> TypeExpr:
    tag = obj["tag"]
    if tag == "atom":
        return Atom(obj["name"])
    if tag == "bottom":
        return BOT
    a, b = (type_from_json(c) for c in obj["children"])
    if tag == "arrow":
        return Arrow(a, b)
    if tag == "minus":
        return Minus(a, b)
    raise ValueError(f"unknown type tag {tag!r}")


# ---------------------------------------------------------------------------
# Concrete syntax: atoms are capitalized identifiers, "->" is right
# associative, "-" is right associative and binds looser than "->".

def parse_type(text: str, offset: int = 0) -> TypeExpr:
    t, pos = _parse_minus(text, _skip_ws(text, offset))
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError("trailing input after type", pos)
    return t


def parse_type_prefix(text: str, offset: int) -> tuple[TypeExpr, int]:
    """Parse a type starting at ``offset``; return it and the end offset."""
    return _parse_minus(text, _skip_ws(text, offset))


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_minus(text: str, pos: int) -> tuple[TypeExpr, int]:
    left, pos = _parse_arrow(text, pos)
    pos2 = _skip_ws(text, pos)
    if text.startswith("-", pos2) and not text.startswith("->", pos2):
        right, pos3 = _parse_minus(text, pos2 + 1)
        return Minus(left, right), pos3
    return left, pos


def _parse_arrow(text: str, pos: int) -> tuple[TypeExpr, int]:
    left, pos = _parse_atom(text, pos)
    pos2 = _skip_ws(text, pos)
    if text.startswith("->", pos2):
        right, pos3 = _parse_arrow(text, _skip_ws(text, pos2 + 2))
        return Arrow(left, right), pos3
    return left, pos


def _parse_atom(text: str, pos: int) -> tuple[TypeExpr, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text):
        raise ParseError("expected a type", pos)
    if text[pos] == "(":
        t, pos2 = _parse_minus(text, pos + 1)
        pos2 = _skip_ws(text, pos2)
        if not text.startswith(")", pos2):
            raise ParseError("expected ')'", pos2)
        return t, pos2 + 1
    if text.startswith("bot", pos) and not _is_name_char(text, pos + 3):
        return BOT, pos + 3
    if text[pos].isupper():
        end = pos + 1
        while _is_name_char(text, end):
            end += 1
        return Atom(text[pos:end]), end
    raise ParseError("expected a type atom, 'bot' or '('", pos)


def _is_name_char(text: str, pos: int) -> bool:
    return pos < len(text) and (text[pos].isalnum() or text[pos] == "_")
