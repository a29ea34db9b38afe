"""Candidate first-order queries from collapsed triples and relation buckets.

Each candidate picks one relation per bucket (a hypothesis), scored by the
mean of the picked weights. Construct rules inspect the question graph:

  * sort rule: a ``have-degree-91`` frame with a superlative ``most``
    argument produces an ORDER BY / LIMIT construct over a quantity
    property drawn from an attribute lexicon;
  * count rule: a count-question (unknown attached via :quant) produces a
    COUNT aggregate unless the relation already binds a number;
  * type rule: after execution, an answer set mixing distinct types gains
    a type constraint on the target variable.

Queries serialize to a fixed single-line SPARQL grammar.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .amr import AmrGraph
from .kb import NUMERIC_RANGES, RDF_TYPE, KnowledgeBase, is_variable
from .linking import RelationBucket, TypeLink
from .triples import CollapsedTriple, TripleSet

__all__ = [
    "Atom",
    "CountConstruct",
    "Hypothesis",
    "LogicQuery",
    "SortConstruct",
    "UnknownAttributeError",
    "apply_c_rule",
    "apply_s_rule",
    "apply_t_rule",
    "generate_hypotheses",
    "load_attribute_lexicon",
    "orient_atom",
    "to_sparql",
]


class UnknownAttributeError(KeyError):
    def __init__(self, attribute: str):
        super().__init__(f"attribute {attribute!r} missing from the attribute lexicon")
        self.attribute = attribute


@dataclass(frozen=True)
class Atom:
    predicate: str
    subject: str
    object: str

    def variables(self) -> list[str]:
        return [t for t in (self.subject, self.object) if is_variable(t)]

    def __str__(self) -> str:
        return f"{self.predicate}({self.subject}, {self.object})"


@dataclass(frozen=True)
class SortConstruct:
    variable: str
    direction: str  # "asc" | "desc"
    limit: int
    support_atom: Atom  # binds the sort variable to its quantity property


@dataclass(frozen=True)
class CountConstruct:
    variable: str


@dataclass(frozen=True)
class LogicQuery:
    kind: str  # "select" | "ask" | "count"
    target: str | None
    atoms: tuple[Atom, ...]
    type_atoms: tuple[tuple[str, str], ...] = ()
    sort: SortConstruct | None = None
    count: CountConstruct | None = None

    def variables(self) -> list[str]:
        seen: list[str] = []
        atoms = list(self.atoms)
        if self.sort:
            atoms.append(self.sort.support_atom)
        for atom in atoms:
            for var in atom.variables():
                if var not in seen:
                    seen.append(var)
        for var, _ in self.type_atoms:
            if var not in seen:
                seen.append(var)
        return seen


@dataclass(frozen=True)
class Hypothesis:
    choices: tuple[tuple[str, float], ...]  # one (relation, weight) per bucket
    score: float  # mean of the chosen weights


def load_attribute_lexicon(path: str | Path) -> dict[str, tuple[str, str]]:
    """TSV ``attribute \\t property IRI \\t direction`` for superlatives."""
    table: dict[str, tuple[str, str]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        attribute, prop, direction = line.split("\t")
        table[attribute] = (prop, direction)
    return table


def _frame_arg_target(graph: AmrGraph, frame_var: str, arg: str) -> str | None:
    for e in graph.outgoing(frame_var):
        if re.fullmatch(f":{arg}", e.role, re.IGNORECASE):
            return e.target
    return None


def _fresh_query_var(stem: str, taken: set[str]) -> str:
    var = f"?{stem}"
    i = 2
    while var in taken:
        var = f"?{stem}{i}"
        i += 1
    return var


def apply_s_rule(
    graph: AmrGraph,
    attr_lexicon: Mapping[str, tuple[str, str]],
    trace: list[str] | None = None,
) -> SortConstruct | None:
    """Superlative handling via the have-degree-91 frame: :ARG3 ``most``
    selects a sort over the quantity property the :ARG2 attribute maps to.
    Comparatives (``more``) are unsupported and only traced."""
    degree_var = graph.find_concept("have-degree-91")
    if degree_var is None:
        return None
    arg3 = _frame_arg_target(graph, degree_var, "ARG3")
    degree = graph.node(arg3).concept if arg3 else None
    if degree != "most":
        if trace is not None and degree == "more":
            trace.append("sort-rule: unsupported comparative degree 'more'")
        return None
    arg2 = _frame_arg_target(graph, degree_var, "ARG2")
    if arg2 is None:
        return None
    attribute = graph.node(arg2).concept
    if attribute not in attr_lexicon:
        raise UnknownAttributeError(attribute)
    prop, direction = attr_lexicon[attribute]
    arg1 = _frame_arg_target(graph, degree_var, "ARG1")
    if arg1 is None:
        # fall back to whatever the frame hangs off (inverse attachment)
        incoming = graph.incoming(degree_var)
        if not incoming:
            return None
        arg1 = incoming[0].source
    subject = f"?{arg1}"
    quantity_var = _fresh_query_var(
        prop.rpartition(":")[2], {f"?{v}" for v in graph.nodes}
    )
    return SortConstruct(
        variable=quantity_var,
        direction=direction,
        limit=1,
        support_atom=Atom(prop, subject, quantity_var),
    )


def quant_head(triple_set: TripleSet) -> CollapsedTriple | None:
    """The ``quant`` hop attaching the unknown to the counted noun, if any."""
    if not triple_set.count_flag:
        return None
    for t in triple_set.triples:
        if t.relation_label == "quant" and triple_set.focus in (t.subject_node, t.object_node):
            return t
    return None


def apply_c_rule(
    graph: AmrGraph,
    triple_set: TripleSet,
    buckets: Sequence[RelationBucket],
    kb: KnowledgeBase,
    target: str,
    trace: list[str] | None = None,
) -> CountConstruct | None:
    """Decide whether a count-question needs a COUNT aggregate.

    The answer type is taken to be cardinal when the unknown carries a
    :quant attachment or the root is a have-quant-91 frame. If the target's
    relation already has a numeric domain or range, the direct triple
    produces the number and no aggregate is added.
    """
    cardinal = triple_set.count_flag or graph.node(graph.root).concept == "have-quant-91"
    if not cardinal:
        return None
    for bucket in buckets:
        if target in (bucket.subject, bucket.object):
            relation, _ = bucket.top()
            domain, range_ = kb.domain_range(relation)
            if domain in NUMERIC_RANGES or range_ in NUMERIC_RANGES:
                if trace is not None:
                    trace.append(
                        f"count-rule: {relation} binds a number directly; no aggregate"
                    )
                return None
            break
    if trace is not None:
        trace.append(f"count-rule: adding COUNT over {target}")
    return CountConstruct(target)


def _comparable(kb: KnowledgeBase, cls: str, declared: str) -> bool:
    return kb.isa_star(cls, declared) or kb.isa_star(declared, cls)


def _term_compatible(
    kb: KnowledgeBase,
    term: str,
    declared: str | None,
    var_types: Mapping[str, str],
) -> bool:
    if declared is None:
        return True
    if is_variable(term):
        cls = var_types.get(term)
        return cls is None or _comparable(kb, cls, declared)
    types = kb.types_of(term)
    if not types:
        return True
    return any(_comparable(kb, t, declared) for t in types)


def orient_atom(
    triple: CollapsedTriple,
    relation: str,
    kb: KnowledgeBase,
    var_types: Mapping[str, str],
) -> Atom:
    """Choose which endpoint is the SPARQL subject.

    Domain/range compatibility decides when it can; otherwise the triple's
    path direction stands, flipped when the label came from a single edge
    walked against its role direction.
    """
    domain, range_ = kb.domain_range(relation)
    as_written = Atom(relation, triple.subject, triple.object)
    swapped = Atom(relation, triple.object, triple.subject)

    def fits(atom: Atom) -> bool:
        return _term_compatible(kb, atom.subject, domain, var_types) and _term_compatible(
            kb, atom.object, range_, var_types
        )

    fw, bw = fits(as_written), fits(swapped)
    if fw and not bw:
        return as_written
    if bw and not fw:
        return swapped
    return swapped if triple.inverted_edge else as_written


@dataclass
class QueryShape:
    """Everything besides the relation choices that a query needs."""

    kind: str
    target: str | None
    var_types: dict[str, str]  # query variable -> class IRI (from type links)
    sort: SortConstruct | None = None
    count: CountConstruct | None = None


def build_query(
    triples: Sequence[CollapsedTriple],
    choices: Sequence[tuple[str, float]],
    shape: QueryShape,
    kb: KnowledgeBase,
) -> LogicQuery:
    atoms = tuple(
        orient_atom(triple, relation, kb, shape.var_types)
        for triple, (relation, _) in zip(triples, choices)
    )
    used_vars: list[str] = []
    for atom in atoms:
        for var in atom.variables():
            if var not in used_vars:
                used_vars.append(var)
    if shape.sort:
        for var in shape.sort.support_atom.variables():
            if var not in used_vars:
                used_vars.append(var)
    type_atoms = tuple(
        (var, shape.var_types[var]) for var in used_vars if var in shape.var_types
    )
    return LogicQuery(
        kind=shape.kind,
        target=shape.target,
        atoms=atoms,
        type_atoms=type_atoms,
        sort=shape.sort,
        count=shape.count,
    )


def generate_hypotheses(
    buckets: Sequence[RelationBucket],
    triples: Sequence[CollapsedTriple],
    shape: QueryShape,
    kb: KnowledgeBase,
    beam: int = 4,
    top_k: int | None = None,
) -> list[tuple[Hypothesis, LogicQuery]]:
    """Enumerate relation combinations (top ``beam`` candidates per bucket),
    rank by mean weight with lexicographic tie-breaking, and instantiate a
    query per hypothesis."""
    if not buckets:
        raise ValueError("no relation buckets to combine")
    pools = [bucket.candidates[:beam] for bucket in buckets]
    ranked: list[Hypothesis] = []
    for combo in itertools.product(*pools):
        score = sum(w for _, w in combo) / len(combo)
        ranked.append(Hypothesis(choices=tuple(combo), score=score))
    ranked.sort(key=lambda h: (-h.score, tuple(iri for iri, _ in h.choices)))
    if top_k is not None:
        ranked = ranked[:top_k]
    return [(h, build_query(triples, h.choices, shape, kb)) for h in ranked]


def most_specific_type(kb: KnowledgeBase, term: str) -> str | None:
    types = kb.types_of(term)
    if not types:
        return None
    specific = [
        t for t in types if not any(o != t and kb.isa_star(o, t) for o in types)
    ]
    return sorted(specific or types)[0]


def apply_t_rule(
    candidate_answers: Sequence[str],
    logic: LogicQuery,
    type_links: Sequence[TypeLink],
    kb: KnowledgeBase,
    focus_var: str | None = None,
    trace: list[str] | None = None,
) -> LogicQuery | None:
    """Add a type constraint on the target when the unconstrained answer set
    mixes distinct most-specific types. The constraint class comes from the
    focus node's type link when available, else the majority answer type."""
    if logic.target is None or not candidate_answers:
        return None
    observed: list[str] = []
    for term in candidate_answers:
        cls = most_specific_type(kb, term)
        if cls is not None:
            observed.append(cls)
    if len(set(observed)) <= 1:
        return None
    constraint = None
    if focus_var is not None:
        for link in type_links:
            if link.node == focus_var:
                constraint = link.class_iri
                break
    if constraint is None:
        counts: dict[str, int] = {}
        for cls in observed:
            counts[cls] = counts.get(cls, 0) + 1
        constraint = sorted(counts, key=lambda c: (-counts[c], c))[0]
    if (logic.target, constraint) in logic.type_atoms:
        return None
    if trace is not None:
        trace.append(
            f"type-rule: heterogeneous answer types {sorted(set(observed))}; "
            f"constraining {logic.target} to {constraint}"
        )
    return replace(logic, type_atoms=logic.type_atoms + ((logic.target, constraint),))


# --- SPARQL serialization ---------------------------------------------------


def _where_entries(logic: LogicQuery) -> list[tuple[str, str, str]]:
    entries = [(var, RDF_TYPE, cls) for var, cls in logic.type_atoms]
    entries.extend((a.subject, a.predicate, a.object) for a in logic.atoms)
    if logic.sort:
        a = logic.sort.support_atom
        entries.append((a.subject, a.predicate, a.object))
    entries.sort(key=lambda e: (e[0], 0 if e[1] == RDF_TYPE else 1, e[1], e[2]))
    return entries


def to_sparql(logic: LogicQuery) -> str:
    """Deterministic single-line serialization: triples one per ``s p o .``
    group, sorted by subject with rdf:type constraints first."""
    where = " ".join(f"{s} {p} {o} ." for s, p, o in _where_entries(logic))
    body = f"WHERE {{ {where} }}"
    if logic.kind == "ask":
        return f"ASK {body}"
    if logic.kind == "count":
        counted = logic.count.variable if logic.count else logic.target
        alias = "?c" if counted != "?c" else "?cnt"
        return f"SELECT (COUNT(DISTINCT {counted}) AS {alias}) {body}"
    variables = logic.variables()
    projection = []
    if logic.target is not None:
        projection.append(logic.target)
    projection.extend(sorted(v for v in variables if v != logic.target))
    text = f"SELECT DISTINCT {' '.join(projection)} {body}"
    if logic.sort:
        direction = "DESC" if logic.sort.direction == "desc" else "ASC"
        text += f" ORDER BY {direction}({logic.sort.variable}) LIMIT {logic.sort.limit}"
    return text
