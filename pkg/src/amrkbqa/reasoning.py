"""Truth-bounded evaluation of candidate queries over the knowledge base.

A query's syntax tree maps one-to-one onto a network of predicate leaves,
connectives, and an existential root. Leaves are grounded through the
store under globally computed variable bindings; bounds then propagate
upward (evaluation) and downward (modus ponens, modus tollens,
conjunction elimination) to a fixpoint, only ever tightening.

Candidate queries are tried in rank order. Type-inconsistent candidates
are discarded up front; boolean questions that stay unknown fall back to
holonym search with an exclusive-container axiom (an entity contained in
one country cannot be contained in another).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import bounds as tb
from .bounds import TRUE, UNKNOWN, TruthBounds
from .kb import GraphPattern, KnowledgeBase, RDF_TYPE, eval_bgp, is_literal, is_variable, term_text
from .logic import Atom, LogicQuery, to_sparql

__all__ = [
    "AllHypothesesDiscardedError",
    "AndNode",
    "AnswerSet",
    "ContradictionError",
    "ExistsNode",
    "LnnNetwork",
    "NotNode",
    "OrNode",
    "PredicateNode",
    "build_network",
    "check_type_consistency",
    "compute_global_bindings",
    "downward_pass",
    "evaluate",
    "ground_predicate",
    "holonym_fallback",
    "upward_pass",
]

_EPS = 1e-9

RowKey = tuple[tuple[str, str], ...]  # sorted (variable, term) pairs


class ContradictionError(ArithmeticError):
    def __init__(self, node: str):
        super().__init__(f"contradictory bounds at node {node!r}")
        self.node = node


class AllHypothesesDiscardedError(RuntimeError):
    pass


class StepLog:
    """Ordered trace of bound revisions: ``STEP n | node | before → after | rule``."""

    def __init__(self, sink: list[str] | None = None):
        self.sink = sink
        self.n = 0

    def step(self, node: str, before: TruthBounds, after: TruthBounds, rule: str) -> None:
        if self.sink is None:
            return
        self.n += 1
        self.sink.append(f"STEP {self.n} | {node} | {before} → {after} | {rule}")

    def note(self, text: str) -> None:
        if self.sink is not None:
            self.sink.append(text)


# --- network nodes ----------------------------------------------------------


class Node:
    label = "node"

    def __init__(self, name: str | None = None):
        self.name = name or self.label
        self.bounds: dict[RowKey, TruthBounds] = {}
        self.children: list[Node] = []

    def rows(self) -> list[RowKey]:
        return list(self.bounds)

    def get(self, row: RowKey) -> TruthBounds:
        return self.bounds.get(row, UNKNOWN)

    def tighten(self, row: RowKey, new: TruthBounds, rule: str, log: StepLog) -> bool:
        before = self.get(row)
        merged = before.intersect(new)
        if not merged.is_consistent:
            log.step(self._row_name(row), before, merged, rule)
            raise ContradictionError(self.name)
        if merged.lower <= before.lower + _EPS and merged.upper >= before.upper - _EPS:
            self.bounds.setdefault(row, before)
            return False
        self.bounds[row] = merged
        log.step(self._row_name(row), before, merged, rule)
        return True

    def _row_name(self, row: RowKey) -> str:
        if not row:
            return self.name
        binding = ",".join(f"{v}={t}" for v, t in row)
        return f"{self.name}{{{binding}}}"

    def from_children(self, row: RowKey) -> TruthBounds:
        raise NotImplementedError


class PredicateNode(Node):
    label = "pred"

    def __init__(self, atom: Atom | None, name: str | None = None):
        super().__init__(name or (str(atom) if atom else None))
        self.atom = atom


class NotNode(Node):
    label = "not"

    def __init__(self, child: Node, name: str | None = None):
        super().__init__(name or f"not({child.name})")
        self.children = [child]

    def from_children(self, row: RowKey) -> TruthBounds:
        return self.children[0].get(row).negated()


class AndNode(Node):
    label = "and"

    def __init__(self, children: Sequence[Node], name: str | None = None):
        super().__init__(name)
        self.children = list(children)

    def from_children(self, row: RowKey) -> TruthBounds:
        return tb.conjunction(c.get(row) for c in self.children)


class OrNode(Node):
    label = "or"

    def __init__(self, children: Sequence[Node], name: str | None = None, implication: bool = False):
        super().__init__(name or ("implies" if implication else None))
        self.children = list(children)
        self.implication = implication

    def from_children(self, row: RowKey) -> TruthBounds:
        return tb.disjunction(c.get(row) for c in self.children)


class ExistsNode(Node):
    label = "exists"

    def __init__(self, child: Node, variables: Sequence[str] = (), name: str | None = None):
        super().__init__(name or (f"exists({','.join(variables)})" if variables else None))
        self.children = [child]
        self.variables = tuple(variables)

    def from_children(self, row: RowKey) -> TruthBounds:
        child = self.children[0]
        return tb.disjunction(child.get(r) for r in child.rows())


def _walk(node: Node) -> Iterable[Node]:
    yield node
    for child in node.children:
        yield from _walk(child)


@dataclass
class LnnNetwork:
    root: Node
    leaves: list[PredicateNode]
    logic: LogicQuery | None = None
    rows: list[RowKey] = field(default_factory=list)

    def nodes(self) -> list[Node]:
        seen: list[Node] = []
        for node in _walk(self.root):
            if node not in seen:
                seen.append(node)
        return seen


def build_network(logic: LogicQuery) -> LnnNetwork:
    """Map the query syntax tree onto a network: one leaf per atom (type
    constraints included), a conjunction when there are several, and an
    existential root whenever variables occur."""
    leaves = [
        PredicateNode(Atom(RDF_TYPE, var, cls)) for var, cls in logic.type_atoms
    ]
    leaves.extend(PredicateNode(atom) for atom in logic.atoms)
    if logic.sort:
        leaves.append(PredicateNode(logic.sort.support_atom))
    body: Node = leaves[0] if len(leaves) == 1 else AndNode(leaves)
    variables = logic.variables()
    root: Node = ExistsNode(body, variables) if variables else body
    return LnnNetwork(root=root, leaves=leaves, logic=logic)


# --- grounding --------------------------------------------------------------


def _row_key(solution: Mapping[str, str]) -> RowKey:
    return tuple(sorted(solution.items()))


def _substitute(atom: Atom, row: Mapping[str, str]) -> Atom:
    s = row.get(atom.subject, atom.subject) if is_variable(atom.subject) else atom.subject
    o = row.get(atom.object, atom.object) if is_variable(atom.object) else atom.object
    return Atom(atom.predicate, s, o)


def _leaves_under(node: Node) -> list[PredicateNode]:
    return [n for n in _walk(node) if isinstance(n, PredicateNode)]


def compute_global_bindings(network: LnnNetwork, kb: KnowledgeBase) -> list[dict[str, str]]:
    """Evaluate the joint pattern of the leaves once; the solutions restrict
    every subsequent per-predicate grounding. A disjunctive body yields the
    union of its branches' binding tables."""
    body = network.root.children[0] if isinstance(network.root, ExistsNode) else network.root
    if isinstance(body, OrNode):
        branches = [_leaves_under(child) for child in body.children]
    else:
        branches = [network.leaves]
    solutions: list[dict[str, str]] = []
    for branch in branches:
        patterns = [(l.atom.subject, l.atom.predicate, l.atom.object) for l in branch]
        pattern = GraphPattern(patterns=patterns)
        if not pattern.variables():
            continue
        for solution in eval_bgp(kb, pattern):
            if solution not in solutions:
                solutions.append(solution)
    return solutions


def ground_predicate(
    leaf: PredicateNode,
    bindings: Sequence[Mapping[str, str]],
    kb: KnowledgeBase,
    log: StepLog | None = None,
) -> None:
    """Instantiate the leaf under each binding row: a present fact enters at
    [1,1], an absent one at [0,1]."""
    log = log or StepLog()
    if not bindings:
        ground = _substitute(leaf.atom, {})
        if not (is_variable(ground.subject) or is_variable(ground.object)):
            leaf.bounds[()] = kb.ask(ground.subject, ground.predicate, ground.object)
            log.note(f"ground {ground}: {leaf.bounds[()]}")
        return
    for solution in bindings:
        ground = _substitute(leaf.atom, solution)
        row = _row_key(solution)
        if is_variable(ground.subject) or is_variable(ground.object):
            # a union row from another branch: nothing known about this leaf
            leaf.bounds[row] = UNKNOWN
            continue
        leaf.bounds[row] = kb.ask(ground.subject, ground.predicate, ground.object)
        log.note(f"ground {ground}: {leaf.bounds[row]}")


def ground_network(
    network: LnnNetwork,
    kb: KnowledgeBase,
    log: StepLog | None = None,
) -> list[dict[str, str]]:
    bindings = compute_global_bindings(network, kb)
    network.rows = [_row_key(b) for b in bindings]
    for leaf in network.leaves:
        ground_predicate(leaf, bindings, kb, log)
    return bindings


# --- bound propagation ------------------------------------------------------


def _node_rows(node: Node) -> list[RowKey]:
    if isinstance(node, ExistsNode):
        return [()]
    if node.children:
        rows: list[RowKey] = []
        for child in node.children:
            for row in _node_rows(child):
                if row not in rows:
                    rows.append(row)
        return rows
    return node.rows() or [()]


def upward_pass(network: LnnNetwork, log: StepLog | None = None) -> TruthBounds:
    """Leaves-to-root evaluation; returns the root bounds."""
    log = log or StepLog()
    order = list(_walk(network.root))
    for node in reversed(order):  # children precede parents
        if not node.children:
            continue
        for row in _node_rows(node):
            node.tighten(row, node.from_children(row), "evaluate", log)
    root_rows = _node_rows(network.root)
    return network.root.get(root_rows[0])


def _push_down(node: Node, log: StepLog) -> bool:
    changed = False
    if isinstance(node, NotNode):
        child = node.children[0]
        for row in _node_rows(node):
            changed |= child.tighten(row, node.get(row).negated(), "negation", log)
        return changed
    if isinstance(node, AndNode):
        for row in _node_rows(node):
            own = node.get(row)
            lowers = [c.get(row).lower for c in node.children]
            for i, child in enumerate(node.children):
                changed |= child.tighten(
                    row, TruthBounds(own.lower, 1.0), "conjunction elimination", log
                )
                others = [l for j, l in enumerate(lowers) if j != i]
                if others and min(others) > own.upper + _EPS:
                    changed |= child.tighten(
                        row, TruthBounds(0.0, own.upper), "conjunction upper bound", log
                    )
        return changed
    if isinstance(node, OrNode):
        for row in _node_rows(node):
            own = node.get(row)
            uppers = [c.get(row).upper for c in node.children]
            for i, child in enumerate(node.children):
                changed |= child.tighten(
                    row, TruthBounds(0.0, own.upper), "disjunction upper bound", log
                )
                others = [u for j, u in enumerate(uppers) if j != i]
                if others and max(others) < own.lower - _EPS:
                    rule = "disjunctive syllogism"
                    if node.implication:
                        rule = "modus tollens" if i == 0 else "modus ponens"
                    changed |= child.tighten(
                        row, TruthBounds(own.lower, 1.0), rule, log
                    )
        return changed
    if isinstance(node, ExistsNode):
        child = node.children[0]
        own = node.get(())
        child_rows = _node_rows(child)
        uppers = {row: child.get(row).upper for row in child_rows}
        for row in child_rows:
            changed |= child.tighten(
                row, TruthBounds(0.0, own.upper), "existential upper bound", log
            )
            others = [u for r, u in uppers.items() if r != row]
            if others and max(others) < own.lower - _EPS:
                changed |= child.tighten(
                    row, TruthBounds(own.lower, 1.0), "existential witness", log
                )
        return changed
    return False


def downward_pass(network: LnnNetwork, log: StepLog | None = None) -> None:
    """Propagate bounds in both directions to a fixpoint; bounds only
    tighten, and inconsistent tightening raises ContradictionError."""
    log = log or StepLog()
    nodes = network.nodes()
    values: set[float] = set()
    for node in nodes:
        for b in node.bounds.values():
            values.update((b.lower, b.upper))
    limit = max(8, len(nodes) * max(2, len(values)))
    for _ in range(limit):
        changed = False
        for node in nodes:
            if node.children:
                for row in _node_rows(node):
                    changed |= node.tighten(row, node.from_children(row), "evaluate", log)
                changed |= _push_down(node, log)
        if not changed:
            return
    raise RuntimeError("bound propagation did not reach a fixpoint")


# --- type-consistency gate ----------------------------------------------------


def check_type_consistency(
    logic: LogicQuery,
    kb: KnowledgeBase,
    extra_types: Mapping[str, Sequence[str]] | None = None,
) -> str | None:
    """Return a discard reason when some atom has a constant argument whose
    every asserted type falls outside the predicate's declared domain or
    range; variables and untyped constants pass (open world)."""
    extra_types = extra_types or {}
    for atom in logic.atoms:
        domain, range_ = kb.domain_range(atom.predicate)
        for term, declared, position in (
            (atom.subject, domain, "subject"),
            (atom.object, range_, "object"),
        ):
            if declared is None or is_variable(term) or is_literal(term):
                continue
            types = list(kb.types_of(term)) + list(extra_types.get(term, ()))
            if not types:
                continue
            if not any(kb.isa_star(t, declared) for t in types):
                return (
                    f"{atom}: {position} {term} has types {sorted(types)}, "
                    f"none under {declared}"
                )
    return None


# --- holonym fallback ---------------------------------------------------------


def _holonym_reach(
    kb: KnowledgeBase, start: str, depth: int
) -> dict[str, list[tuple[str, str]]]:
    """Entities reachable from ``start`` over the configured holonym
    relations, mapped to the (property, entity) hop list that reached them."""
    reached: dict[str, list[tuple[str, str]]] = {start: []}
    frontier = [start]
    for _ in range(depth):
        next_frontier: list[str] = []
        for entity in frontier:
            steps: list[tuple[str, str]] = []
            for prop, direction in kb.holonym_relations:
                if direction == "inverse":
                    steps.extend((prop, t.s) for t in kb.match(None, prop, entity))
                else:
                    steps.extend((prop, t.o) for t in kb.match(entity, prop, None))
            for prop, nxt in sorted(steps):
                if nxt not in reached:
                    reached[nxt] = reached[entity] + [(prop, nxt)]
                    next_frontier.append(nxt)
        frontier = next_frontier
        if not frontier:
            break
    reached.pop(start, None)
    return reached


def _render_hops(start: str, hops: list[tuple[str, str]]) -> str:
    out = start
    for prop, entity in hops:
        out += f" -{prop}-> {entity}"
    return out


def holonym_fallback(
    atom: Atom,
    kb: KnowledgeBase,
    depth: int = 4,
    trace: list[str] | None = None,
    log: StepLog | None = None,
) -> TruthBounds:
    """Decide an unknown ground fact through container reasoning.

    The store is searched for the subject's actual objects under the same
    predicate. A holonym path from an actual object to the queried object
    proves the fact. A path ending at a different container of the same
    exclusive type (e.g. another country) triggers the inclusion axiom:
    the fact is refuted by modus tollens. Anything else stays unknown.
    """
    log = log or StepLog(trace)
    retrieved = sorted(t.o for t in kb.match(atom.subject, atom.predicate, None))
    if not retrieved:
        log.note(f"fallback: no {atom.predicate} facts for {atom.subject}")
        return UNKNOWN
    log.note(f"fallback: {atom.predicate} of {atom.subject} -> {', '.join(retrieved)}")
    target_types = set(kb.types_of(atom.object))
    for origin in retrieved:
        reached = _holonym_reach(kb, origin, depth)
        if atom.object in reached:
            log.note(
                f"fallback: holonym path {_render_hops(origin, reached[atom.object])}"
            )
            return TRUE
    for origin in retrieved:
        reached = _holonym_reach(kb, origin, depth)
        for container in sorted(reached):
            if container == atom.object:
                continue
            shared = sorted(
                set(kb.types_of(container)) & target_types & kb.exclusive_container_types
            )
            if not shared:
                continue
            log.note(
                f"fallback: holonym path {_render_hops(origin, reached[container])}"
            )
            log.note(
                f"inclusion axiom: {origin} is contained in {container} ({shared[0]}); "
                f"distinct {shared[0]} containers cannot contain one another"
            )
            queried = PredicateNode(atom)
            queried.bounds[()] = UNKNOWN
            evidence = PredicateNode(None, name=f"contains({container}, {origin})")
            evidence.bounds[()] = TRUE
            axiom = OrNode(
                [NotNode(queried), NotNode(evidence)],
                name="inclusion-axiom",
                implication=True,
            )
            axiom.bounds[()] = TRUE
            net = LnnNetwork(root=axiom, leaves=[queried, evidence])
            downward_pass(net, log)
            return queried.bounds[()]
    log.note("fallback: no decisive holonym evidence")
    return UNKNOWN


# --- hypothesis evaluation ----------------------------------------------------


@dataclass
class AnswerSet:
    kind: str
    answers: list[str] = field(default_factory=list)
    bounds: TruthBounds | None = None
    count: int | None = None
    chosen_hypothesis: int | None = None
    trace: list[str] = field(default_factory=list)
    bindings: list[dict[str, str]] = field(default_factory=list)


def _select_answers(
    logic: LogicQuery, bindings: list[dict[str, str]]
) -> list[str]:
    rows = bindings
    if logic.sort:
        reverse = logic.sort.direction == "desc"

        def value(row: Mapping[str, str]) -> tuple[bool, float | str]:
            text = term_text(row.get(logic.sort.variable, ""))
            try:
                return False, float(text)
            except ValueError:
                return True, text

        numeric = sorted(
            (r for r in rows if not value(r)[0]), key=lambda r: value(r)[1], reverse=reverse
        )
        textual = sorted(
            (r for r in rows if value(r)[0]), key=lambda r: value(r)[1], reverse=reverse
        )
        rows = (numeric + textual)[: logic.sort.limit]
        answers: list[str] = []
        for row in rows:
            term = row.get(logic.target, "")
            if term and term not in answers:
                answers.append(term)
        return answers
    return sorted({row[logic.target] for row in rows if logic.target in row})


def evaluate(
    hypotheses: Sequence[LogicQuery],
    kb: KnowledgeBase,
    holonym_depth: int = 4,
    trace: list[str] | None = None,
) -> AnswerSet:
    """Try ranked candidate queries until one answers the question.

    Type-inconsistent candidates are discarded with a reason. Select/count
    queries win on the first non-empty binding set; boolean queries win on
    the first decisive [1,1] or [0,0], consulting the holonym fallback when
    direct retrieval stays unknown. An undecided boolean reports [0,1].
    """
    if not hypotheses:
        raise AllHypothesesDiscardedError("no hypotheses to evaluate")
    sink: list[str] = trace if trace is not None else []
    log = StepLog(sink)
    discarded = 0
    for i, logic in enumerate(hypotheses):
        reason = check_type_consistency(logic, kb)
        if reason is not None:
            discarded += 1
            log.note(f"hypothesis {i + 1} discarded (type check): {reason}")
            continue
        log.note(f"hypothesis {i + 1}: {to_sparql(logic)}")
        network = build_network(logic)
        bindings = ground_network(network, kb, log)
        if bindings:
            shown = ", ".join(
                "(" + ", ".join(f"{v}={t}" for v, t in sorted(b.items())) + ")"
                for b in bindings[:8]
            )
            log.note(f"hypothesis {i + 1}: global bindings {shown}")
        else:
            log.note(f"hypothesis {i + 1}: no global bindings")
        root = upward_pass(network, log)
        if logic.kind in ("select", "count"):
            if not bindings:
                log.note(f"hypothesis {i + 1}: empty result, trying next")
                continue
            if logic.kind == "count":
                counted = logic.count.variable if logic.count else logic.target
                count = len({row.get(counted) for row in bindings})
                return AnswerSet(
                    kind="count",
                    answers=[str(count)],
                    count=count,
                    chosen_hypothesis=i,
                    trace=sink,
                    bindings=bindings,
                )
            answers = _select_answers(logic, bindings)
            return AnswerSet(
                kind="select",
                answers=[term_text(a) for a in answers],
                chosen_hypothesis=i,
                trace=sink,
                bindings=bindings,
            )
        # ask
        if not root.is_true and not root.is_false:
            updated = False
            for leaf in network.leaves:
                for row in leaf.rows() or [()]:
                    if leaf.get(row).is_unknown:
                        ground = _substitute(leaf.atom, dict(row))
                        if is_variable(ground.subject) or is_variable(ground.object):
                            continue
                        result = holonym_fallback(ground, kb, holonym_depth, log=log)
                        if not result.is_unknown:
                            leaf.tighten(row, result, "holonym fallback", log)
                            updated = True
            if updated:
                root = upward_pass(network, log)
        if root.is_true or root.is_false:
            verdict = "true" if root.is_true else "false"
            log.note(f"hypothesis {i + 1}: answer {verdict} {root}")
            return AnswerSet(
                kind="ask",
                answers=[verdict],
                bounds=root,
                chosen_hypothesis=i,
                trace=sink,
                bindings=bindings,
            )
        log.note(f"hypothesis {i + 1}: undecided {root}, trying next")
    if discarded == len(hypotheses):
        raise AllHypothesesDiscardedError(
            f"all {discarded} hypotheses were type-inconsistent"
        )
    kind = hypotheses[0].kind
    if kind == "ask":
        return AnswerSet(kind="ask", bounds=UNKNOWN, trace=sink)
    return AnswerSet(kind=kind, trace=sink)
