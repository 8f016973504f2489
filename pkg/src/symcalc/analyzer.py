"""Bounded exhaustive reduction graphs, strong-normalization verdicts,
confluence witnesses, theorem sweeps, and the counterexample search.

Graph nodes are alpha-equivalence classes (canonical nameless forms) with
a representative term each; without that quotient, self-reproducing terms
would unfold into endless chains of renamed variants and cycle detection
would never fire.  A strong-normalization verdict is only issued when the
whole graph fits the node budget and is acyclic; the longest-path measure
is computed by dynamic programming over the finished graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .enumeration import (EnumSpec, annotation_types, enumerate_terms,
                          first_typed_instance)
from .errors import SymcalcError
from .lbar import engine as lbar_engine
from .lbar import syntax as lbar
from .lmu import engine as lmu_engine
from .lmu import syntax as lmu
from .steps import Redex, Step

DEFAULT_NODE_BUDGET = 10 ** 5


def _modules_for(term):
    if isinstance(term, lmu.LmuTerm):
        return lmu, lmu_engine
    return lbar, lbar_engine


# ---------------------------------------------------------------------------
# Reduction graphs.

@dataclass
class ReductionGraph:
    root: object                       # canonical key of the root
    nodes: dict                        # canonical key -> representative term
    edges: list                        # (src_key, rule, position, tgt_key)
    complete: bool
    rules: tuple

    @property
    def nodes_explored(self) -> int:
        return len(self.nodes)

    def successors(self) -> dict:
        succ = {k: [] for k in self.nodes}
        for src, rule, pos, tgt in self.edges:
            succ[src].append((rule, pos, tgt))
        return succ

    def normal_forms(self) -> list:
        with_out = {src for src, _, _, _ in self.edges}
        return [t for k, t in self.nodes.items() if k not in with_out]


def build_graph(term, rules, node_budget: int = DEFAULT_NODE_BUDGET
                ) -> ReductionGraph:
    """Breadth-first closure of the one-step relation, deduplicated by
    canonical form.  Budget exhaustion is flagged, never raised."""
    syn, eng = _modules_for(term)
    root = syn.canonical(term)
    nodes = {root: term}
    edges = []
    complete = True
    frontier = [root]
    while frontier and complete:
        next_frontier = []
        for key in frontier:
            node_term = nodes[key]
            for redex in eng.find_redexes(node_term, rules):
                target = eng.contract(node_term, redex)
                tkey = syn.canonical(target)
                if tkey not in nodes:
                    if len(nodes) >= node_budget:
                        complete = False
                        continue
                    nodes[tkey] = target
                    next_frontier.append(tkey)
                edges.append((key, redex.rule, redex.position, tkey))
        frontier = next_frontier
    return ReductionGraph(root, nodes, edges, complete, tuple(rules))


# ---------------------------------------------------------------------------
# Strong-normalization verdicts.

@dataclass(frozen=True)
class Sn:
    eta: int
    etac: tuple[int, int]
    nodes_explored: int


@dataclass(frozen=True)
class CycleFound:
    path: tuple                        # replayable steps; last step closes the cycle
    nodes_explored: int


@dataclass(frozen=True)
class BudgetExhausted:
    nodes_explored: int


SnVerdict = Sn | CycleFound | BudgetExhausted


def _find_cycle(g: ReductionGraph) -> Optional[list]:
    """Edge path from the root into a cycle (closing on a node already on
    the path), or None when the explored graph is acyclic."""
    succ = g.successors()
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {k: WHITE for k in g.nodes}
    trail: list = []
    stack = [(g.root, iter(succ[g.root]))]
    color[g.root] = GRAY
    while stack:
        key, it = stack[-1]
        advanced = False
        for rule, pos, tgt in it:
            if color[tgt] == GRAY:
                trail.append((key, rule, pos, tgt))
                return trail
            if color[tgt] == WHITE:
                trail.append((key, rule, pos, tgt))
                color[tgt] = GRAY
                stack.append((tgt, iter(succ[tgt])))
                advanced = True
                break
        if not advanced:
            color[key] = BLACK
            stack.pop()
            if trail:
                trail.pop()
    return None


def _replay_path(g: ReductionGraph, trail) -> tuple:
    """Materialize a key path into chained steps starting at the root term."""
    syn, eng = _modules_for(g.nodes[g.root])
    current = g.nodes[g.root]
    steps = []
    for src, rule, pos, tgt in trail:
        redex = Redex(pos, rule)
        target = eng.contract(current, redex)
        steps.append(Step(current, redex, target))
        current = target
    return tuple(steps)


def _longest_paths(g: ReductionGraph) -> dict:
    """Longest outgoing path per node of an acyclic complete graph."""
    succ = g.successors()
    eta: dict = {}
    order = []
    state = {}
    for start in g.nodes:
        if state.get(start):
            continue
        stack = [(start, iter(succ[start]))]
        state[start] = 1
        while stack:
            key, it = stack[-1]
            advanced = False
            for _, _, tgt in it:
                if not state.get(tgt):
                    state[tgt] = 1
                    stack.append((tgt, iter(succ[tgt])))
                    advanced = True
                    break
            if not advanced:
                order.append(key)
                stack.pop()
    for key in order:
        eta[key] = max((1 + eta[tgt] for _, _, tgt in succ[key]), default=0)
    return eta


def sn_check(term, rules, node_budget: int = DEFAULT_NODE_BUDGET) -> SnVerdict:
    """Strong-normalization verdict for one term under a rule set.

    ``Sn`` is only issued when the reduction graph was explored completely
    and is acyclic; a cycle yields ``CycleFound`` with a replayable path,
    and anything cut short by the budget yields ``BudgetExhausted``.
    """
    syn, eng = _modules_for(term)
    if not eng.find_redexes(term, rules):
        return Sn(0, (0, syn.cxty(term)), 1)
    g = build_graph(term, rules, node_budget)
    trail = _find_cycle(g)
    if trail is not None:
        return CycleFound(_replay_path(g, trail), g.nodes_explored)
    if not g.complete:
        return BudgetExhausted(g.nodes_explored)
    eta = _longest_paths(g)[g.root]
    return Sn(eta, (eta, syn.cxty(term)), g.nodes_explored)


def eta_of(term, rules, node_budget: int = DEFAULT_NODE_BUDGET) -> int:
    verdict = sn_check(term, rules, node_budget)
    if not isinstance(verdict, Sn):
        raise SymcalcError(f"term is not certified SN: {verdict}")
    return verdict.eta


# ---------------------------------------------------------------------------
# Confluence witnesses.

def confluence_witnesses(g: ReductionGraph) -> list:
    """All pairs of alpha-distinct normal forms reachable from the root;
    empty exactly when the instance is confluent."""
    if not g.complete:
        raise SymcalcError("confluence witnesses need a complete graph")
    nfs = g.normal_forms()
    return [(a, b) for i, a in enumerate(nfs) for b in nfs[i + 1:]]


# ---------------------------------------------------------------------------
# Theorem sweeps.

@dataclass
class SweepReport:
    spec: EnumSpec
    rules: tuple
    total: int = 0
    sn: int = 0
    cycle: int = 0
    budget: int = 0
    max_eta: int = 0
    eta_histogram: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return self.cycle == 0 and self.budget == 0

    def to_json(self):
        return {"spec": self.spec.to_json(),
                "rules": list(self.rules),
                "total": self.total,
                "verdicts": {"sn": self.sn, "cycle": self.cycle,
                             "budget": self.budget},
                "max_eta": self.max_eta,
                "eta_histogram": {str(k): v for k, v in
                                  sorted(self.eta_histogram.items())},
                "violations": self.violations}


def sweep_sn(spec: EnumSpec, rules, node_budget: int = DEFAULT_NODE_BUDGET,
             ) -> SweepReport:
    """Run sn_check over every enumerated term and aggregate verdicts.

    Non-SN verdicts land in ``violations`` (term text plus verdict kind);
    for the theorem-backed rule configurations that list must come back
    empty.
    """
    report = SweepReport(spec, tuple(rules))
    for term in enumerate_terms(spec):
        report.total += 1
        verdict = sn_check(term, rules, node_budget)
        match verdict:
            case Sn(eta, _, _):
                report.sn += 1
                report.max_eta = max(report.max_eta, eta)
                report.eta_histogram[eta] = report.eta_histogram.get(eta, 0) + 1
            case CycleFound(_, _):
                report.cycle += 1
                report.violations.append(
                    {"term": _print(term), "verdict": "cycle"})
            case BudgetExhausted(n):
                report.budget += 1
                report.violations.append(
                    {"term": _print(term), "verdict": "budget",
                     "nodes_explored": n})
    return report


def _print(term) -> str:
    syn, _ = _modules_for(term)
    return syn.print_lbar(term) if syn is lbar else syn.print_lmu(term)


# ---------------------------------------------------------------------------
# Pair lemma: when two strongly normalizing pieces combine into a term
# that is not, the failure decomposes through one of the root rules.

@dataclass
class PairLemmaReport:
    combined: str
    left_verdict: SnVerdict
    right_verdict: SnVerdict
    combined_verdict: SnVerdict
    vacuous: bool
    decomposition: Optional[dict]
    violation: bool

    @property
    def inconclusive(self) -> bool:
        return (isinstance(self.left_verdict, BudgetExhausted)
                or isinstance(self.right_verdict, BudgetExhausted)
                or isinstance(self.combined_verdict, BudgetExhausted))


def check_pair_lemma(left, right, rules,
                     node_budget: int = DEFAULT_NODE_BUDGET) -> PairLemmaReport:
    """Check the failure-decomposition lemma for a pair.

    Sequent terms combine into the command ``< left | right >`` and the
    decomposition searches root contractions.  Lambda-mu terms combine
    into the application ``(left right)`` and the decomposition searches
    reducts of the components that expose a root lambda or mu.
    """
    syn, eng = _modules_for(left)
    if syn is lbar:
        combined = lbar.Command(left, right)
    else:
        combined = lmu.App(left, right)
    lv = sn_check(left, rules, node_budget)
    rv = sn_check(right, rules, node_budget)
    cv = sn_check(combined, rules, node_budget)
    report = PairLemmaReport(_print(combined), lv, rv, cv,
                             vacuous=isinstance(cv, Sn),
                             decomposition=None, violation=False)
    if not isinstance(lv, Sn) or not isinstance(rv, Sn) or not isinstance(cv, CycleFound):
        return report
    if syn is lbar:
        report.decomposition = _decompose_lbar(combined, rules, node_budget)
    else:
        report.decomposition = _decompose_lmu(left, right, rules, node_budget)
    report.violation = report.decomposition is None
    return report


def _decompose_lbar(combined, rules, node_budget) -> Optional[dict]:
    for redex in lbar_engine.find_redexes(combined, rules):
        if redex.position != ():
            continue
        contractum = lbar_engine.contract(combined, redex)
        verdict = sn_check(contractum, rules, node_budget)
        if isinstance(verdict, CycleFound):
            return {"rule": redex.rule, "contractum": _print(contractum)}
    return None


def _decompose_lmu(left, right, rules, node_budget) -> Optional[dict]:
    lg = build_graph(left, rules, node_budget)
    for reduct in lg.nodes.values():
        if isinstance(reduct, lmu.Abs) and "beta" in rules:
            body = lmu.subst_beta(reduct.body, reduct.var, right)
            if isinstance(sn_check(body, rules, node_budget), CycleFound):
                return {"side": "left", "shape": "lambda",
                        "reduct": _print(reduct), "contractum": _print(body)}
        if isinstance(reduct, lmu.Mu) and "mu" in rules:
            body = lmu.Mu(reduct.var,
                          lmu.subst_mu_r(reduct.body, reduct.var, right))
            if isinstance(sn_check(body, rules, node_budget), CycleFound):
                return {"side": "left", "shape": "mu",
                        "reduct": _print(reduct), "contractum": _print(body)}
    rg = build_graph(right, rules, node_budget)
    for reduct in rg.nodes.values():
        if isinstance(reduct, lmu.Mu) and "mu_prime" in rules:
            body = lmu.Mu(reduct.var,
                          lmu.subst_mu_l(reduct.body, reduct.var, left))
            if isinstance(sn_check(body, rules, node_budget), CycleFound):
                return {"side": "right", "shape": "mu",
                        "reduct": _print(reduct), "contractum": _print(body)}
    return None


# ---------------------------------------------------------------------------
# Counterexample search for the three compound-normalization properties
# of the beta-mu-mu' reduction:
#
#   1. N in SN and (M[x:=N] P...) in SN  implies  ((\\x. M) N P...) in SN
#   2. N in SN and (M[@a=r N] P...) in SN  implies  ((mu @a. M) N P...) in SN
#   3. P... in SN  implies  (x P...) in SN
#
# A suspect is a tuple whose hypothesis terms are certified SN while the
# conclusion term yields a cycle.  Budget exhaustion anywhere makes the
# tuple inconclusive rather than a suspect.

PROPS_RULES = ("beta", "mu", "mu_prime")


@dataclass
class PropsReport:
    property_id: int
    spec: EnumSpec
    total: int = 0
    hypothesis_failed: int = 0
    confirmed: int = 0
    suspects: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)

    def to_json(self):
        return {"property": self.property_id, "spec": self.spec.to_json(),
                "rules": list(PROPS_RULES), "total": self.total,
                "hypothesis_failed": self.hypothesis_failed,
                "confirmed": self.confirmed,
                "suspects": self.suspects,
                "inconclusive": self.inconclusive}


def _apps(head, args):
    for a in args:
        head = lmu.App(head, a)
    return head


def _size_partitions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _size_partitions(total - first, parts - 1):
            yield (first,) + rest


def _candidate_tuples(property_id: int, spec: EnumSpec) -> Iterator[tuple]:
    """Yield (M, N, Ps) tuples whose conclusion term fits the size bound.

    The bound is read as the size of the conclusion term, which is what
    keeps the search space at desk scale.
    """
    by_size: dict[int, tuple] = {}

    def terms(size):
        if size not in by_size:
            from .enumeration import _lmu_terms
            by_size[size] = _lmu_terms(size, 0, 0, spec.n_lvars, spec.n_rvars)
        return by_size[size]

    bound = spec.max_cxty
    if property_id == 3:
        for n_args in range(1, bound):
            for sizes in _size_partitions(bound - 1 - n_args, n_args):
                for combo in _combos(terms, sizes):
                    yield (None, None, combo)
        return
    # conclusion ((\\x. M) N P...) or ((mu @a. M) N P...):
    # 2 + |M| + |N| + sum(1 + |Pi|) <= bound
    for n_args in range(0, bound):
        room = bound - 2 - n_args
        for sizes in _size_partitions(room, 2 + n_args):
            for m in terms(sizes[0]):
                for n in terms(sizes[1]):
                    for combo in _combos(terms, sizes[2:]):
                        yield (m, n, combo)


def _combos(terms, sizes):
    if not sizes:
        yield ()
        return
    for head in terms(sizes[0]):
        for rest in _combos(terms, sizes[1:]):
            yield (head,) + rest


def search_counterexamples(property_id: int, spec: EnumSpec,
                           node_budget: int = DEFAULT_NODE_BUDGET) -> PropsReport:
    if property_id not in (1, 2, 3):
        raise ValueError("property must be 1, 2 or 3")
    report = PropsReport(property_id, spec)
    for m, n, ps in _candidate_tuples(property_id, spec):
        report.total += 1
        if property_id == 3:
            hyps = list(ps)
            conclusion = _apps(lmu.Var("x"), ps)
            tuple_text = {"args": [_print(p) for p in ps]}
        elif property_id == 1:
            hyps = [n, _apps(lmu.subst_beta(m, "x", n), ps)]
            conclusion = _apps(lmu.App(lmu.Abs("x", m), n), ps)
            tuple_text = {"m": _print(m), "n": _print(n),
                          "args": [_print(p) for p in ps]}
        else:
            hyps = [n, _apps(lmu.subst_mu_r(m, "@a", n), ps)]
            conclusion = _apps(lmu.App(lmu.Mu("@a", m), n), ps)
            tuple_text = {"m": _print(m), "n": _print(n),
                          "args": [_print(p) for p in ps]}
        verdicts = [sn_check(h, PROPS_RULES, node_budget) for h in hyps]
        if any(isinstance(v, BudgetExhausted) for v in verdicts):
            report.inconclusive.append(tuple_text | {"stage": "hypothesis"})
            continue
        if not all(isinstance(v, Sn) for v in verdicts):
            report.hypothesis_failed += 1
            continue
        cv = sn_check(conclusion, PROPS_RULES, node_budget)
        if isinstance(cv, Sn):
            report.confirmed += 1
        elif isinstance(cv, CycleFound):
            report.suspects.append(
                tuple_text | {"conclusion": _print(conclusion)})
        else:
            report.inconclusive.append(
                tuple_text | {"stage": "conclusion",
                              "conclusion": _print(conclusion)})
    return report


# ---------------------------------------------------------------------------
# DOT export.

def export_dot(g: ReductionGraph) -> str:
    """Graphviz text with printed terms as node labels and rule tags as
    edge labels; node numbering follows discovery order."""
    ids = {key: i for i, key in enumerate(g.nodes)}
    out = ["digraph reduction {", "  rankdir=LR;"]
    for key, term in g.nodes.items():
        label = _print(term).replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'  n{ids[key]} [label="{label}"];')
    edges = sorted(
        (ids[src], ids[tgt], rule, pos) for src, rule, pos, tgt in g.edges)
    for src_id, tgt_id, rule, _pos in edges:
        tag = lmu_engine.TRACE_TAGS.get(rule, rule)
        out.append(f'  n{src_id} -> n{tgt_id} [label="{tag}"];')
    out.append("}")
    return "\n".join(out) + "\n"
