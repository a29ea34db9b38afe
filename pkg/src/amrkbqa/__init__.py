"""Question answering over RDF knowledge graphs from AMR parses.

The pipeline compiles a question's AMR graph into knowledge-base-aligned
triples along shortest paths from the question focus, ranks candidate
relations into buckets, enumerates scored logical queries, and evaluates
them over an in-memory triple store with open-world truth bounds,
including type-consistency filtering and geographic (holonym) reasoning.
"""

from .amr import (
    AmrEdge,
    AmrGraph,
    AmrNode,
    QuestionMode,
    detect_question_mode,
    parse_penman,
    serialize_penman,
    shortest_path,
)
from .bounds import FALSE, TRUE, UNKNOWN, TruthBounds
from .config import PipelineConfig, load_config
from .kb import GraphPattern, KnowledgeBase, PrefixTable, Triple, eval_bgp, load_ntriples
from .linking import (
    EntityLink,
    RelationBucket,
    TypeLink,
    link_entities,
    link_types,
    score_relation_candidates,
)
from .logic import Atom, Hypothesis, LogicQuery, generate_hypotheses, to_sparql
from .pipeline import (
    Metrics,
    PipelineResult,
    QuestionRecord,
    Resources,
    answer_question,
    evaluate_dataset,
)
from .reasoning import AnswerSet, build_network, evaluate, holonym_fallback
from .triples import CollapsedTriple, TripleSet, generate_triples

__version__ = "0.1.0"
