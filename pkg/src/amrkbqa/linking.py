"""Linking AMR nodes and path labels to knowledge-base vocabulary.

Entity and type linking are lexicon-driven: TSV tables map normalized
surface forms to IRIs. Relation linking scores every vocabulary relation
for a collapsed triple by combining four signals:

  * alignment tables keyed by frame/argument patterns or collapsed labels,
  * an optional plugged-in neural scorer (inert by default),
  * lexical similarity (character-trigram Dice) between the label and the
    relation's local name,
  * a knowledge-base boost for relations already connected to the linked
    endpoint entities.

The weighted sum of the four signals ranks candidates into a bucket.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .amr import AmrGraph, literal_text
from .kb import KnowledgeBase, is_variable

__all__ = [
    "EmptyBucketError",
    "EntityLink",
    "Lexicon",
    "RelationBucket",
    "TypeLink",
    "kb_analysis_boost",
    "link_entities",
    "link_types",
    "load_alignment_table",
    "load_lexicon",
    "score_relation_candidates",
    "token_jaccard",
    "trigram_dice",
]

DEFAULT_JACCARD_THRESHOLD = 0.8
DEFAULT_WEIGHTS = (0.4, 0.0, 0.3, 0.3)  # alignment, neural, lexical, kb-boost
BUCKET_SIZE = 10

# Words whose trailing "s" is not a plural marker.
SINGULARIZE_EXCEPTIONS = frozenset(
    {"news", "physics", "economics", "species", "series", "mathematics", "politics"}
)


class EmptyBucketError(ValueError):
    def __init__(self, label: str):
        super().__init__(f"no relation candidate scored above zero for {label!r}")
        self.label = label


@dataclass(frozen=True)
class EntityLink:
    node: str
    mention: str
    iri: str
    score: float


@dataclass(frozen=True)
class TypeLink:
    node: str
    class_iri: str
    score: float


@dataclass
class RelationBucket:
    index: int
    subject: str
    object: str
    label: str
    candidates: list[tuple[str, float]]  # (relation IRI, weight), descending

    def top(self) -> tuple[str, float]:
        return self.candidates[0]


Lexicon = dict[str, tuple[str, float]]


def normalize_surface(text: str) -> str:
    text = text.casefold()
    text = re.sub(r"[^\w\s]", " ", text)
    return " ".join(text.split())


def load_lexicon(path: str | Path) -> Lexicon:
    """TSV ``surface \\t IRI \\t score``; surfaces are normalized, and on
    duplicate surfaces the higher-scoring entry wins."""
    lexicon: Lexicon = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        surface, iri, score = line.split("\t")
        key = normalize_surface(surface)
        entry = (iri, float(score))
        if key not in lexicon or entry[1] > lexicon[key][1]:
            lexicon[key] = entry
    return lexicon


def load_alignment_table(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    """TSV ``key \\t relation IRI \\t probability``; keys are frame/argument
    patterns (``star-01.arg1.arg2``) or collapsed labels."""
    table: dict[str, list[tuple[str, float]]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, iri, prob = line.split("\t")
        table.setdefault(key, []).append((iri, float(prob)))
    for entries in table.values():
        entries.sort(key=lambda e: (-e[1], e[0]))
    return table


def token_jaccard(a: str, b: str) -> float:
    ta, tb = set(a.split()), set(b.split())
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def singularize(word: str) -> str:
    if word in SINGULARIZE_EXCEPTIONS or word.endswith("ss"):
        return word
    if word.endswith("s") and len(word) > 2:
        return word[:-1]
    return word


def _lookup(lexicon: Lexicon, surface: str, threshold: float) -> tuple[str, float] | None:
    key = normalize_surface(surface)
    if key in lexicon:
        return lexicon[key]
    best: tuple[float, str, float] | None = None
    for entry_key, (iri, score) in lexicon.items():
        overlap = token_jaccard(key, entry_key)
        if overlap < threshold:
            continue
        candidate = (overlap * score, iri, score)
        if best is None or candidate[0] > best[0] or (candidate[0] == best[0] and iri < best[1]):
            best = (candidate[0], iri, candidate[0])
    if best is None:
        return None
    return best[1], best[2]


def mention_of(graph: AmrGraph, node_var: str) -> str | None:
    """Surface mention of a named node: the :opN literals of its :name child
    joined in argument order."""
    for edge in graph.outgoing(node_var):
        if edge.role != ":name":
            continue
        name_node = graph.node(edge.target)
        ops = []
        for role, value in name_node.attributes:
            m = re.match(r"^:op(\d+)$", role)
            if m:
                ops.append((int(m.group(1)), literal_text(value)))
        if ops:
            return " ".join(text for _, text in sorted(ops))
    return None


def link_entities(
    graph: AmrGraph,
    lexicon: Lexicon,
    threshold: float = DEFAULT_JACCARD_THRESHOLD,
    trace: list[str] | None = None,
) -> list[EntityLink]:
    """Link named nodes (and lexicon-known plain concepts) to entity IRIs.

    A named node's mention is matched exactly first, then by token Jaccard
    at or above ``threshold``; the link attaches to the parent of the
    :name subtree. Unlinkable mentions are reported to the trace.
    """
    links: list[EntityLink] = []
    for var, node in graph.nodes.items():
        if node.concept in ("name", "amr-unknown") or node.is_frame:
            continue
        mention = mention_of(graph, var)
        if mention is None:
            mention = node.concept.replace("-", " ")
            if normalize_surface(mention) not in lexicon:
                continue
        hit = _lookup(lexicon, mention, threshold)
        if hit is None:
            if trace is not None:
                trace.append(f"entity-linking: no match for mention {mention!r} (node {var})")
            continue
        links.append(EntityLink(var, mention, hit[0], hit[1]))
    return links


def link_types(graph: AmrGraph, type_lexicon: Lexicon) -> list[TypeLink]:
    """Link plain concept nodes (non-frame, non-named) to class IRIs by
    lemma, singularizing plurals."""
    named = {e.source for e in graph.edges if e.role == ":name"}
    links: list[TypeLink] = []
    for var, node in graph.nodes.items():
        if node.is_frame or var in named or node.concept in ("name", "amr-unknown"):
            continue
        for key in (node.concept, singularize(node.concept)):
            entry = type_lexicon.get(normalize_surface(key))
            if entry is not None:
                links.append(TypeLink(var, entry[0], entry[1]))
                break
    return links


# --- relation scoring -------------------------------------------------------


def trigram_dice(a: str, b: str) -> float:
    def grams(text: str) -> set[str]:
        text = text.lower()
        if len(text) < 3:
            return {text} if text else set()
        return {text[i : i + 3] for i in range(len(text) - 2)}

    ga, gb = grams(a), grams(b)
    if not ga or not gb:
        return 0.0
    return 2 * len(ga & gb) / (len(ga) + len(gb))


def relation_local_name(iri: str) -> str:
    return iri.rpartition(":")[2]


def _segment_lemma(segment: str) -> str:
    return re.sub(r"-\d\d+$", "", segment)


def default_similarity(label: str, relation_iri: str) -> float:
    """Best character-trigram Dice between any label segment's lemma and the
    relation's local name."""
    local = relation_local_name(relation_iri)
    return max(trigram_dice(_segment_lemma(seg), local) for seg in label.split("|"))


def alignment_keys(label: str, subject_arg: str | None, object_arg: str | None) -> list[str]:
    """Candidate alignment-table keys, most specific first. Single-frame
    labels with known argument roles get a ``frame.argA.argB`` key with the
    arguments in sorted order (the pair is unordered; orientation is decided
    later from domain/range evidence)."""
    keys = []
    if subject_arg and object_arg and "|" not in label:
        keys.append(f"{label}.{'.'.join(sorted((subject_arg, object_arg)))}")
    keys.append(label)
    return keys


def _alignment_scores(
    table: Mapping[str, Sequence[tuple[str, float]]],
    label: str,
    subject_arg: str | None,
    object_arg: str | None,
) -> dict[str, float]:
    for key in alignment_keys(label, subject_arg, object_arg):
        if key in table:
            return {iri: prob for iri, prob in table[key]}
    # Fall back to per-segment lookup with max-pooling across segments.
    pooled: dict[str, float] = {}
    for segment in label.split("|"):
        for iri, prob in table.get(segment, ()):
            pooled[iri] = max(pooled.get(iri, 0.0), prob)
    return pooled


def _incident(kb: KnowledgeBase, relation: str, endpoints: Sequence[str]) -> bool:
    for term in endpoints:
        if is_variable(term):
            continue
        if kb.match(term, relation, None) or kb.match(None, relation, term):
            return True
    return False


def kb_analysis_boost(bucket: RelationBucket, kb: KnowledgeBase) -> list[float]:
    """Per-candidate boost: 1.0 when the relation has a triple incident to a
    linked endpoint of the bucket, else 0.0."""
    endpoints = (bucket.subject, bucket.object)
    return [1.0 if _incident(kb, iri, endpoints) else 0.0 for iri, _ in bucket.candidates]


def score_relation_candidates(
    triple,
    kb: KnowledgeBase,
    align_table: Mapping[str, Sequence[tuple[str, float]]],
    sim_provider: Callable[[str, str], float] | None = None,
    neural_scorer: Callable[[str, str], float] | None = None,
    weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS,
    index: int = 0,
    keep: int = BUCKET_SIZE,
) -> RelationBucket:
    """Rank knowledge-base relations for one collapsed triple.

    ``triple`` provides ``subject``/``object`` terms, ``relation_label``, and
    the optional subject/object argument roles used for alignment keys.
    The candidate vocabulary is every relation in the alignment table plus
    every predicate of the knowledge base.
    """
    sim = sim_provider or default_similarity
    label = triple.relation_label
    vocabulary = sorted(
        {iri for entries in align_table.values() for iri, _ in entries} | set(kb.properties())
    )
    aligned = _alignment_scores(align_table, label, triple.subject_arg, triple.object_arg)
    w_align, w_neural, w_lex, w_boost = weights
    scored: list[tuple[str, float]] = []
    endpoints = (triple.subject, triple.object)
    for iri in vocabulary:
        align = aligned.get(iri, 0.0)
        neural = neural_scorer(label, iri) if neural_scorer is not None else 0.0
        lexical = sim(label, iri)
        boost = 1.0 if _incident(kb, iri, endpoints) else 0.0
        score = w_align * align + w_neural * neural + w_lex * lexical + w_boost * boost
        if score > 0.0:
            scored.append((iri, score))
    if not scored:
        raise EmptyBucketError(label)
    scored.sort(key=lambda c: (-c[1], c[0]))
    return RelationBucket(
        index=index,
        subject=triple.subject,
        object=triple.object,
        label=label,
        candidates=scored[:keep],
    )
