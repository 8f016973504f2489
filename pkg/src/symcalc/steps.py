"""Redexes, steps, and step sequences shared by both reduction engines."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PostponeError


@dataclass(frozen=True)
class Redex:
    """A rule instance at a position (a path of child indices from the root)."""
    position: tuple[int, ...]
    rule: str


@dataclass(frozen=True)
class Step:
    """One contraction: ``target`` is ``source`` with the redex contracted."""
    source: object
    redex: Redex
    target: object


def validate_chain(steps) -> None:
    """Check that consecutive steps chain (target of one is source of next)."""
    for a, b in zip(steps, steps[1:]):
        if a.target != b.source:
            raise PostponeError(
                f"steps do not chain: {a.target} then {b.source}")
