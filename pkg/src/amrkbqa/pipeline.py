"""End-to-end orchestration: question record in, answers and SPARQL out.

Stages: PENMAN parsing, question-mode detection, entity/type linking,
path-based triple extraction, relation-candidate scoring, construct rules,
hypothesis enumeration, and truth-bounded evaluation. A failing stage is
captured into the result (scored as a wrong answer, never a crash), and
every stage appends to the result's trace.

The evaluation harness scores answer sets with the question-answering
conventions: both sides empty counts as a perfect answer, an empty system
answer against a non-empty gold one counts as zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .amr import QuestionMode, detect_question_mode, parse_penman
from .config import PipelineConfig
from .kb import KnowledgeBase, PrefixTable, load_ntriples
from .linking import (
    Lexicon,
    link_entities,
    link_types,
    load_alignment_table,
    load_lexicon,
    score_relation_candidates,
)
from .logic import (
    QueryShape,
    apply_c_rule,
    apply_s_rule,
    apply_t_rule,
    generate_hypotheses,
    load_attribute_lexicon,
    quant_head,
    to_sparql,
)
from .reasoning import evaluate
from .triples import generate_triples

__all__ = [
    "Metrics",
    "MissingGoldError",
    "PipelineResult",
    "QuestionMetrics",
    "QuestionRecord",
    "Resources",
    "answer_question",
    "evaluate_dataset",
    "load_records",
    "score_answers",
]


class MissingGoldError(ValueError):
    def __init__(self, record_id: str):
        super().__init__(f"record {record_id!r} has no gold answers")
        self.record_id = record_id


@dataclass
class QuestionRecord:
    id: str
    text: str
    amr: str
    gold_answers: list[str] | None = None
    gold_sparql: str | None = None

    @classmethod
    def from_json(cls, data: dict) -> "QuestionRecord":
        return cls(
            id=str(data["id"]),
            text=data.get("text", ""),
            amr=data["amr"],
            gold_answers=data.get("gold_answers"),
            gold_sparql=data.get("gold_sparql"),
        )


def load_records(path: str | Path) -> list[QuestionRecord]:
    records = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(QuestionRecord.from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ValueError(f"bad dataset line {lineno}: {exc}") from exc
    return records


@dataclass
class Resources:
    prefixes: PrefixTable
    entity_lexicon: Lexicon
    type_lexicon: Lexicon
    alignment: dict[str, list[tuple[str, float]]]
    attribute_lexicon: dict[str, tuple[str, str]]

    @classmethod
    def load(cls, config: PipelineConfig) -> "Resources":
        return cls(
            prefixes=PrefixTable.from_tsv(config.resolve("prefixes_path", "prefixes.tsv")),
            entity_lexicon=load_lexicon(config.resolve("entity_lexicon_path", "entity_lexicon.tsv")),
            type_lexicon=load_lexicon(config.resolve("type_lexicon_path", "type_lexicon.tsv")),
            alignment=load_alignment_table(config.resolve("alignment_path", "alignment.tsv")),
            attribute_lexicon=load_attribute_lexicon(
                config.resolve("attribute_lexicon_path", "attribute_lexicon.tsv")
            ),
        )


def load_kb(config: PipelineConfig, resources: Resources, path: str | Path | None = None) -> KnowledgeBase:
    kb_path = Path(path) if path else config.resolve("kb_path", "toy_kb.nt")
    kb = load_ntriples(kb_path, resources.prefixes)
    kb.holonym_relations = list(config.holonym_relations)
    kb.exclusive_container_types = set(config.exclusive_container_types)
    return kb


@dataclass
class PipelineResult:
    id: str
    sparql: str = ""
    kind: str = ""
    answers: list[str] = field(default_factory=list)
    chosen_hypothesis: int | None = None
    bindings: list[dict[str, str]] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    error: str | None = None


def answer_question(
    record: QuestionRecord,
    kb: KnowledgeBase,
    resources: Resources,
    config: PipelineConfig | None = None,
) -> PipelineResult:
    """Run the full pipeline for one question; stage failures are captured
    into the result rather than raised."""
    config = config or PipelineConfig()
    result = PipelineResult(id=record.id)
    trace = result.trace
    try:
        graph = parse_penman(record.amr, sentence=record.text)
        mode = detect_question_mode(graph)
        trace.append(f"mode: {mode.value}")

        entity_links = link_entities(
            graph, resources.entity_lexicon, config.entity_match_threshold, trace
        )
        link_map = {l.node: l.iri for l in entity_links}
        trace.append(
            "entities: "
            + (", ".join(f"{l.node}->{l.iri}" for l in entity_links) or "none")
        )
        if not link_map:
            result.error = "no entities linked"
            trace.append("aborted: no entities linked")
            return result
        type_links = link_types(graph, resources.type_lexicon)
        trace.append(
            "types: " + (", ".join(f"{l.node}->{l.class_iri}" for l in type_links) or "none")
        )

        triple_set = generate_triples(graph, link_map, mode)
        for rendered in triple_set.paths:
            trace.append(f"path: {rendered}")
        for t in triple_set.triples:
            trace.append(f"triple: ({t.subject}, {t.relation_label}, {t.object})")

        # The quant hop of a count question maps to a construct, not a
        # knowledge-base relation, so it is not scored as a bucket.
        head = quant_head(triple_set)
        effective = [t for t in triple_set.triples if t is not head]
        if not effective:
            result.error = "no relation-bearing triples"
            return result
        target = f"?{triple_set.focus}"
        if head is not None:
            partner = head.object_node if head.subject_node == triple_set.focus else head.subject_node
            target = f"?{partner}"
            trace.append(f"count question: target moves to {target}")

        buckets = [
            score_relation_candidates(
                t,
                kb,
                resources.alignment,
                weights=config.weights,
                index=i,
                keep=config.bucket_size,
            )
            for i, t in enumerate(effective)
        ]
        for b in buckets:
            shown = ", ".join(f"{iri}:{w:.3f}" for iri, w in b.candidates[:4])
            trace.append(f"bucket {b.index} [{b.label}]: {shown}")

        sort = apply_s_rule(graph, resources.attribute_lexicon, trace)
        count = apply_c_rule(graph, triple_set, buckets, kb, target, trace)
        kind = "ask" if mode is QuestionMode.INTERROGATIVE else "select"
        if count is not None:
            kind = "count"
        var_types = {}
        for link in type_links:
            if link.node in link_map:
                continue
            var_types.setdefault(f"?{link.node}", link.class_iri)
        shape = QueryShape(kind=kind, target=None if kind == "ask" else target,
                           var_types=var_types, sort=sort, count=count)

        ranked = generate_hypotheses(
            buckets, effective, shape, kb, beam=config.beam, top_k=config.top_k
        )
        queries = [q for _, q in ranked]
        answer = evaluate(queries, kb, config.holonym_depth, trace)

        chosen = answer.chosen_hypothesis
        final_logic = queries[chosen] if chosen is not None else queries[0]
        if answer.kind == "select" and chosen is not None:
            amended = apply_t_rule(
                answer.answers,
                final_logic,
                type_links,
                kb,
                focus_var=triple_set.focus,
                trace=trace,
            )
            if amended is not None:
                rerun = evaluate([amended], kb, config.holonym_depth, trace)
                if rerun.chosen_hypothesis is not None:
                    answer = rerun
                    answer.chosen_hypothesis = chosen
                    final_logic = amended

        result.kind = answer.kind
        result.chosen_hypothesis = answer.chosen_hypothesis
        result.bindings = answer.bindings
        result.sparql = to_sparql(final_logic)
        if answer.kind == "ask" and answer.bounds is not None and answer.bounds.is_unknown:
            if config.closed_world_output:
                result.answers = ["false"]
                trace.append("closed-world output: undecided ask reported as false")
            else:
                result.answers = []
                trace.append("undecided ask: no answer reported (open world)")
        else:
            result.answers = list(answer.answers)
    except Exception as exc:  # crash containment: record the failure, move on
        result.error = f"{type(exc).__name__}: {exc}"
        trace.append(f"error: {result.error}")
    return result


# --- metrics ------------------------------------------------------------------


@dataclass
class QuestionMetrics:
    id: str
    precision: float
    recall: float
    f1: float


@dataclass
class Metrics:
    per_question: list[QuestionMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    macro_f1_qald: float


def score_answers(gold: list[str], system: list[str]) -> tuple[float, float, float]:
    """Set precision/recall/F1 with the question-answering conventions:
    both empty -> all 1, system empty against non-empty gold -> all 0."""
    gold_set, system_set = set(gold), set(system)
    if not gold_set and not system_set:
        return 1.0, 1.0, 1.0
    if not system_set or not gold_set:
        return 0.0, 0.0, 0.0
    overlap = len(gold_set & system_set)
    precision = overlap / len(system_set)
    recall = overlap / len(gold_set)
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def evaluate_dataset(
    records: list[QuestionRecord],
    kb: KnowledgeBase,
    resources: Resources,
    config: PipelineConfig | None = None,
) -> tuple[Metrics, list[PipelineResult]]:
    """Answer every record and macro-average the per-question scores.
    ``macro_f1_qald`` is the macro mean of per-question F1 under the
    empty-answer conventions of score_answers."""
    results = []
    per_question = []
    for record in records:
        if record.gold_answers is None:
            raise MissingGoldError(record.id)
        result = answer_question(record, kb, resources, config)
        results.append(result)
        p, r, f1 = score_answers(record.gold_answers, result.answers)
        per_question.append(QuestionMetrics(record.id, p, r, f1))
    n = len(per_question) or 1
    macro_p = sum(q.precision for q in per_question) / n
    macro_r = sum(q.recall for q in per_question) / n
    macro_f1 = sum(q.f1 for q in per_question) / n
    metrics = Metrics(
        per_question=per_question,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        macro_f1_qald=macro_f1,
    )
    return metrics, results
