"""Transforming an entity-linked AMR graph into knowledge-base-shaped triples.

The question graph is first normalized for its question type (imperative
root removal, artificial unknown creation, focus adjustment), then a
shortest path is drawn from the focus node to each entity-linked node.
Along each path, consecutive predicate elements, i.e. PropBank frame
nodes and non-core edge roles, are merged into a single pipe-joined
relation label, while plain concept and entity nodes become triple
endpoints. Paths accumulate into a small graph so hops shared by several
paths emit exactly one triple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .amr import (
    AmrEdge,
    AmrGraph,
    AmrNode,
    Path,
    QuestionMode,
    base_role,
    is_core_role,
    shortest_path,
)

__all__ = [
    "CollapsedTriple",
    "NoFocusError",
    "PreprocessedQuestion",
    "TripleSet",
    "collapse_path",
    "generate_triples",
    "preprocess_question_structure",
]

# Roles that never contribute to a relation label.
_NON_LABEL_RE = re.compile(r"^:(name|mode|op\d+)$")


class NoFocusError(ValueError):
    pass


def _is_label_role(role: str) -> bool:
    base, _ = base_role(role)
    return not (is_core_role(base) or _NON_LABEL_RE.match(base))


def _bare(role: str) -> str:
    base, _ = base_role(role)
    return base.lstrip(":")


def _arg_name(role: str) -> str | None:
    base, _ = base_role(role)
    m = re.match(r"^:ARG(\d+)$", base, re.IGNORECASE)
    return f"arg{m.group(1)}" if m else None


@dataclass(frozen=True)
class CollapsedTriple:
    subject: str  # term: "?var", CURIE, or literal
    relation_label: str
    object: str
    subject_node: str | None = None  # AMR variables behind the terms
    object_node: str | None = None
    subject_arg: str | None = None  # frame argument roles adjacent to the
    object_arg: str | None = None  # endpoints, for alignment-table keys
    inverted_edge: bool = False  # single-edge label walked against the role
    path_text: str = ""

    def key(self) -> tuple[str, str, str]:
        return (self.subject, self.relation_label, self.object)


@dataclass
class TripleSet:
    triples: list[CollapsedTriple]
    focus: str  # focus variable in the preprocessed graph
    count_flag: bool = False
    paths: list[str] = field(default_factory=list)


@dataclass
class PreprocessedQuestion:
    graph: AmrGraph
    focus: str
    count_flag: bool = False
    entity_pair: bool = False  # boolean question between two known entities


def _rebuild(graph: AmrGraph, root, nodes, edges) -> AmrGraph:
    return AmrGraph(root, nodes, edges, sentence=graph.sentence)


def _prune_unreachable(root: str, nodes: dict[str, AmrNode], edges: list[AmrEdge]):
    reachable = {root}
    frontier = [root]
    out: dict[str, list[AmrEdge]] = {}
    for e in edges:
        out.setdefault(e.source, []).append(e)
    while frontier:
        var = frontier.pop()
        for e in out.get(var, []):
            if e.target not in reachable:
                reachable.add(e.target)
                frontier.append(e.target)
    nodes = {v: n for v, n in nodes.items() if v in reachable}
    edges = [e for e in edges if e.source in reachable and e.target in reachable]
    return nodes, edges


def _fresh_var(nodes: Mapping[str, AmrNode], stem: str = "q") -> str:
    if stem not in nodes:
        return stem
    i = 2
    while f"{stem}{i}" in nodes:
        i += 1
    return f"{stem}{i}"


def _attach_artificial_unknown(graph: AmrGraph) -> tuple[AmrGraph, str]:
    """Create an amr-unknown node on the lowest-numbered open :ARGn slot of
    the root frame."""
    root_node = graph.node(graph.root)
    if not root_node.is_frame:
        raise NoFocusError(f"cannot attach an unknown to non-frame root {root_node.concept!r}")
    taken = set()
    for e in graph.outgoing(graph.root):
        arg = _arg_name(e.role)
        if arg:
            taken.add(arg)
    slot = 0
    while f"arg{slot}" in taken:
        slot += 1
    var = _fresh_var(graph.nodes)
    nodes = dict(graph.nodes)
    nodes[var] = AmrNode(var, "amr-unknown")
    edges = list(graph.edges) + [AmrEdge(graph.root, f":ARG{slot}", var)]
    return _rebuild(graph, graph.root, nodes, edges), var


def _quant_partner(graph: AmrGraph, var: str) -> str | None:
    for e in graph.edges:
        if e.role == ":quant":
            if e.source == var:
                return e.target
            if e.target == var:
                return e.source
    return None


def _mod_neighbour(graph: AmrGraph, var: str) -> str | None:
    for e in graph.edges:
        if e.role == ":mod":
            if e.source == var:
                return e.target
            if e.target == var:
                return e.source
    return None


def preprocess_question_structure(
    graph: AmrGraph,
    mode: QuestionMode,
    entity_nodes: Mapping[str, str] | None = None,
) -> PreprocessedQuestion:
    """Normalize the graph for its question type and pick the focus node.

    Imperative: the focus is the :ARG1 child of the imperative root; the
    root and its edges are removed (subtrees left dangling are pruned).
    Interrogative: with two or more linked entities the first entity (in
    document order) becomes the focus so a path between known entities can
    be drawn; with exactly one, an artificial amr-unknown is attached to the
    open argument slot of the root frame. Inquisitive: the amr-unknown is
    the focus; a :mod neighbour takes over as focus when present, and a
    :quant attachment raises the count flag for downstream query shaping.
    """
    entity_nodes = entity_nodes or {}
    if mode is QuestionMode.IMPERATIVE:
        root = graph.root
        arg1 = [e.target for e in graph.outgoing(root) if _arg_name(e.role) == "arg1"]
        if not arg1:
            raise NoFocusError("imperative root has no :ARG1 child")
        focus = arg1[0]
        nodes = {v: n for v, n in graph.nodes.items() if v != root}
        edges = [e for e in graph.edges if root not in (e.source, e.target)]
        nodes, edges = _prune_unreachable(focus, nodes, edges)
        return PreprocessedQuestion(_rebuild(graph, focus, nodes, edges), focus)

    if mode is QuestionMode.INTERROGATIVE:
        linked = [v for v in graph.nodes if v in entity_nodes]
        if len(linked) >= 2:
            return PreprocessedQuestion(graph, linked[0], entity_pair=True)
        if len(linked) == 1:
            new_graph, focus = _attach_artificial_unknown(graph)
            return PreprocessedQuestion(new_graph, focus)
        raise NoFocusError("interrogative question without linked entities")

    # Inquisitive
    unknown = graph.find_concept("amr-unknown")
    if unknown is None:
        new_graph, focus = _attach_artificial_unknown(graph)
        return PreprocessedQuestion(new_graph, focus)
    count_flag = _quant_partner(graph, unknown) is not None
    focus = unknown
    mod = _mod_neighbour(graph, unknown)
    if mod is not None:
        focus = mod
    return PreprocessedQuestion(graph, focus, count_flag=count_flag)


def _term_of(var: str, entity_links: Mapping[str, str]) -> str:
    return entity_links.get(var, f"?{var}")


def collapse_path(
    path: Path,
    graph: AmrGraph,
    entity_links: Mapping[str, str] | None = None,
) -> list[CollapsedTriple]:
    """Collapse one focus-to-entity path into triples.

    Frame nodes and non-core roles accumulate into the relation label;
    each plain concept or entity node flushes the accumulated label as one
    triple. A hop with an empty label (a lone core-role edge between two
    concepts) falls back to the bare role name, so labels are never empty.
    """
    entity_links = entity_links or {}
    triples: list[CollapsedTriple] = []
    prev = path.source
    parts: list[str] = []
    frames_merged = 0
    chain_steps: list[tuple[str, bool]] = []  # (role, effective forward)
    rendered = path.render(graph)
    for step in path.steps:
        base, inverted = base_role(step.role)
        effective_forward = step.forward != inverted
        chain_steps.append((base, effective_forward))
        if _is_label_role(step.role):
            parts.append(_bare(step.role))
        node = graph.node(step.node)
        if node.is_frame:
            parts.append(node.concept)
            frames_merged += 1
            continue
        label = "|".join(parts) if parts else _bare(step.role)
        subject_arg = object_arg = None
        if frames_merged == 1 and len(parts) == 1 and len(chain_steps) == 2:
            # label is exactly one frame: record the entry/exit argument roles
            subject_arg = _arg_name(chain_steps[0][0])
            object_arg = _arg_name(chain_steps[1][0])
        single_edge = len(chain_steps) == 1
        triples.append(
            CollapsedTriple(
                subject=_term_of(prev, entity_links),
                relation_label=label,
                object=_term_of(step.node, entity_links),
                subject_node=prev,
                object_node=step.node,
                subject_arg=subject_arg,
                object_arg=object_arg,
                inverted_edge=single_edge and not effective_forward,
                path_text=rendered,
            )
        )
        prev = step.node
        parts = []
        frames_merged = 0
        chain_steps = []
    return triples


def generate_triples(
    graph: AmrGraph,
    entity_links: Mapping[str, str],
    mode: QuestionMode,
) -> TripleSet:
    """Run the full path-based extraction: preprocess, walk a shortest path
    from the focus to every linked entity, collapse, and deduplicate hops
    shared between paths."""
    if not entity_links:
        raise NoFocusError("no linked entities to draw paths to")
    pre = preprocess_question_structure(graph, mode, entity_links)
    g = pre.graph
    links = {v: iri for v, iri in entity_links.items() if v in g.nodes}
    targets = [v for v in g.nodes if v in links and v != pre.focus]
    if not targets:
        raise NoFocusError("no path targets besides the focus")
    seen: set[tuple[str, str, str]] = set()
    collected: list[CollapsedTriple] = []
    rendered_paths: list[str] = []
    for entity_var in targets:
        path = shortest_path(g, pre.focus, entity_var)
        rendered_paths.append(path.render(g))
        for triple in collapse_path(path, g, links):
            if triple.key() not in seen:
                seen.add(triple.key())
                collected.append(triple)
    return TripleSet(
        triples=collected,
        focus=pre.focus,
        count_flag=pre.count_flag,
        paths=rendered_paths,
    )
