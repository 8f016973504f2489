"""JSON-lines trace files: one reduction step per line.

Each line is ``{"rule": ..., "position": [...], "from": <AST>, "to": <AST>}``
with terms in the tagged-node JSON export.  Lambda-mu traces spell the
symmetric mu rule ``mu'``.
"""

from __future__ import annotations

import json

from .lbar import syntax as lbar
from .lmu import engine as lmu_engine
from .lmu import syntax as lmu
from .steps import Redex, Step


def _term_io(calculus: str):
    if calculus == "lmu":
        return lmu.to_json, lmu.from_json
    return lbar.to_json, lbar.from_json


def step_to_json(step: Step, calculus: str) -> dict:
    to_json, _ = _term_io(calculus)
    rule = step.redex.rule
    if calculus == "lmu":
        rule = lmu_engine.TRACE_TAGS.get(rule, rule)
    return {"rule": rule, "position": list(step.redex.position),
            "from": to_json(step.source), "to": to_json(step.target)}


def step_from_json(obj: dict, calculus: str) -> Step:
    _, from_json = _term_io(calculus)
    rule = obj["rule"]
    if calculus == "lmu":
        rule = lmu_engine.FROM_TRACE_TAGS.get(rule, rule)
    return Step(from_json(obj["from"]),
                Redex(tuple(obj["position"]), rule),
                from_json(obj["to"]))


def dump_steps(steps, calculus: str) -> str:
    return "".join(json.dumps(step_to_json(s, calculus)) + "\n" for s in steps)


def load_steps(text: str, calculus: str) -> list[Step]:
    return [step_from_json(json.loads(line), calculus)
            for line in text.splitlines() if line.strip()]


def write_trace(path, steps, calculus: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_steps(steps, calculus))


def read_trace(path, calculus: str) -> list[Step]:
    with open(path, encoding="utf-8") as fh:
        return load_steps(fh.read(), calculus)
