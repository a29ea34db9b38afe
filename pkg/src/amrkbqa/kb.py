"""In-memory RDF-style triple store with basic graph pattern evaluation.

Terms are CURIE strings (``dbr:Spain``), quoted literals (``"4808.73"``),
or variables (``?x``). Class hierarchy, property domains, and property
ranges are read from the same N-Triples file as the data, via
``rdfs:subClassOf`` / ``rdfs:domain`` / ``rdfs:range`` statements.

ASK queries over a fully ground triple return truth bounds: a present
triple is ``[1,1]``, an absent one is ``[0,1]`` (open world).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .bounds import TRUE, UNKNOWN, TruthBounds

__all__ = [
    "GraphPattern",
    "KnowledgeBase",
    "MalformedLineError",
    "PrefixTable",
    "Triple",
    "eval_bgp",
    "is_literal",
    "is_variable",
    "load_ntriples",
    "term_text",
]

RDF_TYPE = "rdf:type"
RDFS_SUBCLASS = "rdfs:subClassOf"
RDFS_DOMAIN = "rdfs:domain"
RDFS_RANGE = "rdfs:range"


class MalformedLineError(ValueError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"malformed N-Triples line {lineno}: {line!r}")
        self.lineno = lineno


def is_variable(term: str) -> bool:
    return term.startswith("?")


def is_literal(term: str) -> bool:
    return term.startswith('"')


def term_text(term: str) -> str:
    """Human-facing form of a term: literals lose their quotes and any
    datatype tag, IRIs and variables are returned unchanged."""
    if not is_literal(term):
        return term
    m = re.match(r'^"((?:[^"\\]|\\.)*)"', term)
    return m.group(1) if m else term


class Triple(NamedTuple):
    s: str
    p: str
    o: str


class PrefixTable:
    """Bidirectional CURIE abbreviation, longest namespace match first."""

    def __init__(self, prefixes: dict[str, str]):
        self.prefixes = dict(prefixes)
        self._by_length = sorted(prefixes.items(), key=lambda kv: -len(kv[1]))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "PrefixTable":
        prefixes = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            prefix, namespace = line.split("\t")
            prefixes[prefix] = namespace
        return cls(prefixes)

    def abbreviate(self, iri: str) -> str:
        for prefix, namespace in self._by_length:
            if iri.startswith(namespace):
                return f"{prefix}:{iri[len(namespace):]}"
        return f"<{iri}>"

    def expand(self, curie: str) -> str:
        if curie.startswith("<") and curie.endswith(">"):
            return curie[1:-1]
        prefix, _, local = curie.partition(":")
        if prefix in self.prefixes:
            return self.prefixes[prefix] + local
        return curie


# Ranges that make a select variable bind a number rather than a resource.
NUMERIC_RANGES = frozenset(
    {
        "xsd:integer",
        "xsd:nonNegativeInteger",
        "xsd:positiveInteger",
        "xsd:decimal",
        "xsd:double",
        "xsd:float",
        "xsd:long",
        "xsd:int",
    }
)


class KnowledgeBase:
    def __init__(self):
        self.triples: list[Triple] = []
        self._spo: set[Triple] = set()
        self._by_s: dict[str, list[Triple]] = {}
        self._by_p: dict[str, list[Triple]] = {}
        self._by_o: dict[str, list[Triple]] = {}
        self.subclass: dict[str, set[str]] = {}  # direct superclasses
        self.domain: dict[str, str] = {}
        self.range: dict[str, str] = {}
        # Geographic-reasoning configuration; overridable from the pipeline
        # configuration. Direction "inverse" walks the property backwards.
        self.holonym_relations: list[tuple[str, str]] = [
            ("dbo:isPartOf", "forward"),
            ("dbo:country", "forward"),
            ("dbo:federalState", "forward"),
            ("dbo:hasPart", "inverse"),
        ]
        self.exclusive_container_types: set[str] = {"dbo:Country"}

    def __len__(self) -> int:
        return len(self.triples)

    def add(self, triple: Triple) -> None:
        if triple in self._spo:
            return  # duplicates ignored silently
        self.triples.append(triple)
        self._spo.add(triple)
        self._by_s.setdefault(triple.s, []).append(triple)
        self._by_p.setdefault(triple.p, []).append(triple)
        self._by_o.setdefault(triple.o, []).append(triple)
        if triple.p == RDFS_SUBCLASS:
            self.subclass.setdefault(triple.s, set()).add(triple.o)
        elif triple.p == RDFS_DOMAIN:
            self.domain[triple.s] = triple.o
        elif triple.p == RDFS_RANGE:
            self.range[triple.s] = triple.o

    def contains(self, s: str, p: str, o: str) -> bool:
        return Triple(s, p, o) in self._spo

    def match(self, s: str | None, p: str | None, o: str | None) -> list[Triple]:
        """All triples matching the pattern; ``None`` is a wildcard."""
        candidates: Iterable[Triple]
        if s is not None:
            candidates = self._by_s.get(s, [])
        elif o is not None:
            candidates = self._by_o.get(o, [])
        elif p is not None:
            candidates = self._by_p.get(p, [])
        else:
            candidates = self.triples
        return [
            t
            for t in candidates
            if (s is None or t.s == s) and (p is None or t.p == p) and (o is None or t.o == o)
        ]

    def ask(self, s: str, p: str, o: str) -> TruthBounds:
        """Open-world membership: present -> [1,1], absent -> [0,1]."""
        return TRUE if self.contains(s, p, o) else UNKNOWN

    def types_of(self, term: str) -> list[str]:
        return sorted(t.o for t in self.match(term, RDF_TYPE, None))

    def isa_star(self, sub: str, sup: str) -> bool:
        """Reflexive-transitive subclass reachability."""
        if sub == sup:
            return True
        seen = {sub}
        frontier = [sub]
        while frontier:
            cls = frontier.pop()
            for parent in self.subclass.get(cls, ()):
                if parent == sup:
                    return True
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        return False

    def domain_range(self, prop: str) -> tuple[str | None, str | None]:
        return self.domain.get(prop), self.range.get(prop)

    def properties(self) -> list[str]:
        """Relation vocabulary: every predicate except schema plumbing."""
        skip = {RDF_TYPE, RDFS_SUBCLASS, RDFS_DOMAIN, RDFS_RANGE}
        return sorted(p for p in self._by_p if p not in skip)

    def _check_subclass_acyclic(self) -> None:
        state: dict[str, int] = {}
        for start in self.subclass:
            if start in state:
                continue
            stack = [(start, iter(self.subclass.get(start, ())))]
            state[start] = 0
            while stack:
                cls, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[cls] = 1
                    stack.pop()
                elif state.get(nxt) == 0:
                    raise ValueError(f"subclass cycle through {nxt!r}")
                elif nxt not in state:
                    state[nxt] = 0
                    stack.append((nxt, iter(self.subclass.get(nxt, ()))))


_NT_LINE_RE = re.compile(
    r"""^\s*
    (?P<s><[^>]+>)\s+
    (?P<p><[^>]+>)\s+
    (?P<o><[^>]+>|"(?:[^"\\]|\\.)*"(?:\^\^<[^>]+>)?)\s*
    \.\s*$""",
    re.VERBOSE,
)


def _abbreviate_object(raw: str, prefixes: PrefixTable) -> str:
    if raw.startswith("<"):
        return prefixes.abbreviate(raw[1:-1])
    if "^^" in raw:
        lexical, _, datatype = raw.rpartition("^^")
        return f"{lexical}^^{prefixes.abbreviate(datatype[1:-1])}"
    return raw


def load_ntriples(path: str | Path, prefixes: PrefixTable) -> KnowledgeBase:
    """Load an N-Triples subset file: one ``<s> <p> <o> .`` statement per
    line, ``#`` comment lines, literal objects allowed. IRIs are stored
    abbreviated through the prefix table."""
    kb = KnowledgeBase()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _NT_LINE_RE.match(line)
        if not m:
            raise MalformedLineError(lineno, line)
        s = prefixes.abbreviate(m.group("s")[1:-1])
        p = prefixes.abbreviate(m.group("p")[1:-1])
        o = _abbreviate_object(m.group("o"), prefixes)
        kb.add(Triple(s, p, o))
    kb._check_subclass_acyclic()
    return kb


# --- basic graph patterns ---------------------------------------------------


@dataclass
class GraphPattern:
    """A conjunction of triple patterns plus optional VALUES pre-bindings
    restricting which terms a variable may take."""

    patterns: list[tuple[str, str, str]]
    values: dict[str, frozenset[str]] = field(default_factory=dict)

    def variables(self) -> list[str]:
        seen: list[str] = []
        for s, p, o in self.patterns:
            for term in (s, p, o):
                if is_variable(term) and term not in seen:
                    seen.append(term)
        return seen


def _static_count(kb: KnowledgeBase, pattern: tuple[str, str, str]) -> int:
    s, p, o = pattern
    return len(
        kb.match(
            None if is_variable(s) else s,
            None if is_variable(p) else p,
            None if is_variable(o) else o,
        )
    )


def eval_bgp(kb: KnowledgeBase, pattern: GraphPattern) -> list[dict[str, str]]:
    """Evaluate a basic graph pattern by nested-loop join, most restrictive
    pattern first. Returns solutions sorted by variable name then term."""
    if not pattern.patterns:
        return []
    order = sorted(
        range(len(pattern.patterns)),
        key=lambda i: (_static_count(kb, pattern.patterns[i]), i),
    )
    solutions: list[dict[str, str]] = [{}]
    for idx in order:
        s, p, o = pattern.patterns[idx]
        extended: list[dict[str, str]] = []
        for sol in solutions:
            bs = sol.get(s, s) if is_variable(s) else s
            bp = sol.get(p, p) if is_variable(p) else p
            bo = sol.get(o, o) if is_variable(o) else o
            matches = kb.match(
                None if is_variable(bs) else bs,
                None if is_variable(bp) else bp,
                None if is_variable(bo) else bo,
            )
            for triple in matches:
                new = dict(sol)
                ok = True
                for term, value in ((bs, triple.s), (bp, triple.p), (bo, triple.o)):
                    if not is_variable(term):
                        continue
                    allowed = pattern.values.get(term)
                    if allowed is not None and value not in allowed:
                        ok = False
                        break
                    if term in new and new[term] != value:
                        ok = False
                        break
                    new[term] = value
                if ok and new not in extended:
                    extended.append(new)
        solutions = extended
        if not solutions:
            return []
    variables = sorted(pattern.variables())
    solutions.sort(key=lambda sol: tuple(sol.get(v, "") for v in variables))
    return solutions
