"""AMR question graphs: data model, PENMAN-subset text format, graph search.

An AMR graph is a rooted, directed, acyclic graph. Nodes carry concepts
(PropBank frames like ``produce-01`` or plain concepts like ``movie``),
edges carry roles (``:ARG0``, ``:mod``, ...), and nodes may additionally
carry attributes: quoted literals (``:op1 "Spain"``) or symbol constants
(``:mode interrogative``). Reentrancy is expressed by a bare repeated
variable. A node with concept ``amr-unknown`` marks the questioned entity.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

__all__ = [
    "AmrEdge",
    "AmrGraph",
    "AmrNode",
    "DanglingReentrancyError",
    "DuplicateVariableError",
    "NoPathError",
    "Path",
    "PathStep",
    "PenmanParseError",
    "QuestionMode",
    "UnbalancedParensError",
    "detect_question_mode",
    "graph_equal",
    "parse_penman",
    "serialize_penman",
    "shortest_path",
]

FRAME_RE = re.compile(r"^.*-\d\d$")
CORE_ROLE_RE = re.compile(r"^:ARG\d+(-of)?$", re.IGNORECASE)

# Symbol tokens that are attribute constants rather than variable references.
MODE_VALUES = frozenset({"interrogative", "imperative", "expressive"})


class PenmanParseError(ValueError):
    """Malformed PENMAN text. ``offset`` is the character offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnbalancedParensError(PenmanParseError):
    pass


class DuplicateVariableError(PenmanParseError):
    def __init__(self, var: str, offset: int):
        super().__init__(f"variable {var!r} defined twice", offset)
        self.var = var


class DanglingReentrancyError(PenmanParseError):
    def __init__(self, token: str, offset: int):
        super().__init__(f"reference to undefined variable {token!r}", offset)
        self.var = token


class NoPathError(LookupError):
    def __init__(self, source: str, target: str):
        super().__init__(f"no path between {source!r} and {target!r}")
        self.source = source
        self.target = target


@dataclass(frozen=True)
class AmrNode:
    var: str
    concept: str
    # Attribute values keep their surface form: '"Spain"' stays quoted,
    # 'interrogative' stays bare. Use literal_text() to get the payload.
    attributes: tuple[tuple[str, str], ...] = ()

    @property
    def is_frame(self) -> bool:
        return bool(FRAME_RE.match(self.concept))

    def attribute_values(self, role: str) -> list[str]:
        return [v for r, v in self.attributes if r == role]


@dataclass(frozen=True)
class AmrEdge:
    source: str
    role: str
    target: str


def literal_text(value: str) -> str:
    """Strip surrounding quotes from an attribute value, if any."""
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return value[1:-1]
    return value


def base_role(role: str) -> tuple[str, bool]:
    """Split a role into its base form and an inversion flag (``:ARG1-of``)."""
    if role.endswith("-of") and len(role) > 3:
        return role[: -len("-of")], True
    return role, False


def is_core_role(role: str) -> bool:
    base, _ = base_role(role)
    return bool(CORE_ROLE_RE.match(base))


class AmrGraph:
    """Immutable rooted DAG. Node and edge order is document order."""

    def __init__(
        self,
        root: str,
        nodes: Mapping[str, AmrNode],
        edges: Iterable[AmrEdge],
        sentence: str | None = None,
    ):
        self.root = root
        self.nodes: dict[str, AmrNode] = dict(nodes)
        self.edges: tuple[AmrEdge, ...] = tuple(edges)
        self.sentence = sentence
        self._validate()
        self._adjacency = self._build_adjacency()

    def _validate(self) -> None:
        if self.root not in self.nodes:
            raise ValueError(f"root {self.root!r} is not a node")
        for e in self.edges:
            if e.source not in self.nodes or e.target not in self.nodes:
                raise ValueError(f"edge {e} references an unknown node")
            if not e.role.startswith(":"):
                raise ValueError(f"edge role {e.role!r} must begin with ':'")
        unknowns = [v for v, n in self.nodes.items() if n.concept == "amr-unknown"]
        if len(unknowns) > 1:
            raise ValueError(f"multiple amr-unknown nodes: {unknowns}")
        self._check_acyclic()
        self._check_reachable()

    def _check_acyclic(self) -> None:
        state: dict[str, int] = {}  # 0 visiting, 1 done
        out: dict[str, list[str]] = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e.target)
        for start in self.nodes:
            if start in state:
                continue
            stack: list[tuple[str, int]] = [(start, 0)]
            while stack:
                var, idx = stack.pop()
                if idx == 0:
                    state[var] = 0
                succ = out.get(var, [])
                if idx < len(succ):
                    stack.append((var, idx + 1))
                    nxt = succ[idx]
                    if state.get(nxt) == 0:
                        raise ValueError(f"directed cycle through {nxt!r}")
                    if nxt not in state:
                        stack.append((nxt, 0))
                else:
                    state[var] = 1

    def _check_reachable(self) -> None:
        seen = {self.root}
        frontier = [self.root]
        out: dict[str, list[str]] = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e.target)
        while frontier:
            var = frontier.pop()
            for nxt in out.get(var, []):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        missing = set(self.nodes) - seen
        if missing:
            raise ValueError(f"nodes unreachable from root: {sorted(missing)}")

    def _build_adjacency(self) -> dict[str, tuple[tuple[str, str, bool], ...]]:
        adj: dict[str, list[tuple[str, str, bool]]] = {v: [] for v in self.nodes}
        for e in self.edges:
            adj[e.source].append((e.role, e.target, True))
            adj[e.target].append((e.role, e.source, False))
        return {
            v: tuple(sorted(steps, key=lambda s: (s[0], s[1], not s[2])))
            for v, steps in adj.items()
        }

    def node(self, var: str) -> AmrNode:
        return self.nodes[var]

    def expansion(self, var: str) -> tuple[tuple[str, str, bool], ...]:
        """Undirected neighbours of ``var`` as (role, other, forward) steps,
        sorted by (role, other) so traversals are deterministic."""
        return self._adjacency[var]

    def outgoing(self, var: str) -> list[AmrEdge]:
        return [e for e in self.edges if e.source == var]

    def incoming(self, var: str) -> list[AmrEdge]:
        return [e for e in self.edges if e.target == var]

    def find_concept(self, concept: str) -> str | None:
        for var, node in self.nodes.items():
            if node.concept == concept:
                return var
        return None

    def __repr__(self) -> str:
        return f"AmrGraph(root={self.root!r}, nodes={len(self.nodes)}, edges={len(self.edges)})"


class QuestionMode(Enum):
    INQUISITIVE = "inquisitive"
    INTERROGATIVE = "interrogative"
    IMPERATIVE = "imperative"


def detect_question_mode(graph: AmrGraph) -> QuestionMode:
    """Classify the question from root :mode attributes, defaulting to
    inquisitive (which also covers graphs with an explicit amr-unknown)."""
    modes = graph.node(graph.root).attribute_values(":mode")
    if "imperative" in modes:
        return QuestionMode.IMPERATIVE
    if "interrogative" in modes:
        return QuestionMode.INTERROGATIVE
    return QuestionMode.INQUISITIVE


# --- PENMAN parsing ---------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    \( | \) | /
    | :[A-Za-z][A-Za-z0-9-]*          # role
    | "(?:[^"\\]|\\.)*"               # quoted literal
    | [^\s()/:"]+                     # symbol: variable, concept, constant
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    for m in _TOKEN_RE.finditer(text):
        gap = text[pos : m.start()]
        if gap.strip():
            raise PenmanParseError(f"unexpected characters {gap.strip()!r}", pos)
        tokens.append((m.group(), m.start()))
        pos = m.end()
    if text[pos:].strip():
        raise PenmanParseError(f"unexpected characters {text[pos:].strip()!r}", pos)
    return tokens


def _is_constant_symbol(token: str) -> bool:
    if token in MODE_VALUES or token in ("-", "+"):
        return True
    return token[0].isdigit() or (token[0] in "+-" and len(token) > 1 and token[1].isdigit())


class _Parser:
    def __init__(self, tokens: list[tuple[str, int]], text_len: int):
        self.tokens = tokens
        self.text_len = text_len
        self.i = 0
        self.nodes: dict[str, AmrNode] = {}
        self.edges: list[AmrEdge] = []
        # Pre-scan variable definitions so forward reentrancy resolves.
        self.defined: dict[str, int] = {}
        for j, (tok, off) in enumerate(tokens):
            if tok == "(" and j + 1 < len(tokens):
                var, var_off = tokens[j + 1]
                if var in ("(", ")", "/") or var.startswith(":") or var.startswith('"'):
                    continue
                if var in self.defined:
                    raise DuplicateVariableError(var, var_off)
                self.defined[var] = var_off

    def _peek(self) -> tuple[str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self, expect: str | None = None) -> tuple[str, int]:
        if self.i >= len(self.tokens):
            raise UnbalancedParensError("unexpected end of input", self.text_len)
        tok, off = self.tokens[self.i]
        self.i += 1
        if expect is not None and tok != expect:
            raise UnbalancedParensError(f"expected {expect!r}, found {tok!r}", off)
        return tok, off

    def parse_node(self) -> str:
        self._next("(")
        var, var_off = self._next()
        if var in ("(", ")", "/") or var.startswith(":"):
            raise PenmanParseError(f"expected a variable, found {var!r}", var_off)
        self._next("/")
        concept, concept_off = self._next()
        if concept in ("(", ")", "/") or concept.startswith(":"):
            raise PenmanParseError(f"expected a concept, found {concept!r}", concept_off)
        attributes: list[tuple[str, str]] = []
        self.nodes[var] = AmrNode(var, concept)  # placeholder keeps document order
        while True:
            nxt = self._peek()
            if nxt is None:
                raise UnbalancedParensError("missing ')'", self.text_len)
            tok, off = nxt
            if tok == ")":
                self._next()
                break
            if not tok.startswith(":"):
                raise PenmanParseError(f"expected a role, found {tok!r}", off)
            role = tok
            self._next()
            val = self._peek()
            if val is None:
                raise UnbalancedParensError("unexpected end of input", self.text_len)
            vtok, voff = val
            if vtok == "(":
                child = self.parse_node()
                self.edges.append(AmrEdge(var, role, child))
            elif vtok.startswith('"'):
                self._next()
                attributes.append((role, vtok))
            elif vtok == ")":
                raise PenmanParseError(f"role {role!r} has no value", voff)
            else:
                self._next()
                if vtok in self.defined:
                    self.edges.append(AmrEdge(var, role, vtok))
                elif _is_constant_symbol(vtok):
                    attributes.append((role, vtok))
                else:
                    raise DanglingReentrancyError(vtok, voff)
        self.nodes[var] = AmrNode(var, concept, tuple(attributes))
        return var


def parse_penman(text: str, sentence: str | None = None) -> AmrGraph:
    """Parse one PENMAN-subset graph: ``(var / concept [:role child]...)``
    with quoted literals, symbol constants, and bare-variable reentrancy."""
    tokens = _tokenize(text)
    if not tokens:
        raise UnbalancedParensError("empty input", 0)
    parser = _Parser(tokens, len(text))
    root = parser.parse_node()
    if parser.i < len(parser.tokens):
        tok, off = parser.tokens[parser.i]
        raise UnbalancedParensError(f"trailing content {tok!r}", off)
    return AmrGraph(root, parser.nodes, parser.edges, sentence=sentence)


def serialize_penman(graph: AmrGraph) -> str:
    """Serialize to a single line. Reentrant nodes are defined at their first
    use and referenced by bare variable afterwards; attribute/edge interleaving
    is not preserved, but the result reparses to an isomorphic graph."""
    children: dict[str, list[AmrEdge]] = {}
    for e in graph.edges:
        children.setdefault(e.source, []).append(e)
    defined: set[str] = set()

    def emit(var: str) -> str:
        defined.add(var)
        node = graph.node(var)
        parts = [f"({var} / {node.concept}"]
        for role, value in node.attributes:
            parts.append(f" {role} {value}")
        for edge in children.get(var, []):
            if edge.target in defined:
                parts.append(f" {edge.role} {edge.target}")
            else:
                parts.append(f" {edge.role} {emit(edge.target)}")
        parts.append(")")
        return "".join(parts)

    return emit(graph.root)


def graph_equal(a: AmrGraph, b: AmrGraph) -> bool:
    """Isomorphism under shared variable names: same root, same concepts,
    same attribute multisets, same edge multiset."""
    if a.root != b.root or set(a.nodes) != set(b.nodes):
        return False
    for var in a.nodes:
        na, nb = a.node(var), b.node(var)
        if na.concept != nb.concept or sorted(na.attributes) != sorted(nb.attributes):
            return False
    return sorted((e.source, e.role, e.target) for e in a.edges) == sorted(
        (e.source, e.role, e.target) for e in b.edges
    )


# --- shortest paths ---------------------------------------------------------


@dataclass(frozen=True)
class PathStep:
    role: str
    forward: bool  # False when the edge was walked against its direction
    node: str  # variable arrived at


@dataclass(frozen=True)
class Path:
    source: str
    steps: tuple[PathStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def target(self) -> str:
        return self.steps[-1].node if self.steps else self.source

    def node_vars(self) -> list[str]:
        return [self.source] + [s.node for s in self.steps]

    def as_sequence(self, graph: AmrGraph) -> list[str]:
        """Alternating concept/role rendering; inverse steps get ``^-1``."""
        seq = [graph.node(self.source).concept]
        for step in self.steps:
            seq.append(step.role if step.forward else step.role + "^-1")
            seq.append(graph.node(step.node).concept)
        return seq

    def render(self, graph: AmrGraph) -> str:
        return " -> ".join(self.as_sequence(graph))


def shortest_path(graph: AmrGraph, source: str, target: str) -> Path:
    """Breadth-first shortest path, treating edges as traversable both ways.

    Neighbour expansion is ordered by (role, variable), so among equal-length
    paths the lexicographically least step sequence is returned.
    """
    if source not in graph.nodes or target not in graph.nodes:
        raise KeyError(f"unknown variable in path query: {source!r} or {target!r}")
    if source == target:
        return Path(source, ())
    parent: dict[str, tuple[str, str, bool]] = {source: ("", "", True)}
    queue: deque[str] = deque([source])
    while queue:
        var = queue.popleft()
        for role, other, forward in graph.expansion(var):
            if other not in parent:
                parent[other] = (var, role, forward)
                if other == target:
                    queue.clear()
                    break
                queue.append(other)
    if target not in parent:
        raise NoPathError(source, target)
    steps: list[PathStep] = []
    var = target
    while var != source:
        prev, role, forward = parent[var]
        steps.append(PathStep(role, forward, var))
        var = prev
    steps.reverse()
    return Path(source, tuple(steps))
