"""Command-line interface.

Subcommands:
  answer  answer one question record against a knowledge base
  eval    score a JSON-Lines dataset and write a TSV report plus figure
  sparql  print the generated SPARQL for a question without answering it

Exit codes: 0 success, 2 usage/configuration error, 3 dataset error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .pipeline import (
    MissingGoldError,
    QuestionRecord,
    Resources,
    answer_question,
    evaluate_dataset,
    load_kb,
    load_records,
)
from .report import render_table, write_report


def _load_question(arg: str) -> QuestionRecord:
    path = Path(arg)
    if path.exists():
        text = path.read_text(encoding="utf-8").strip()
        if path.suffix == ".jsonl":
            first = text.splitlines()[0]
            return QuestionRecord.from_json(json.loads(first))
        return QuestionRecord.from_json(json.loads(text))
    return QuestionRecord.from_json(json.loads(arg))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amrkbqa",
        description="Answer natural-language questions over an RDF store from their AMR parses.",
    )
    parser.add_argument("--config", help="configuration JSON (or set AMRKBQA_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    answer = sub.add_parser("answer", help="answer one question record")
    answer.add_argument("--kb", required=True, help="N-Triples knowledge base file")
    answer.add_argument("--question", required=True, help="record file (JSON/JSONL) or inline JSON")
    answer.add_argument("--trace", action="store_true", help="print the reasoning trace")

    evaluate = sub.add_parser("eval", help="score a dataset and write a report")
    evaluate.add_argument("--kb", required=True)
    evaluate.add_argument("--dataset", required=True, help="JSON-Lines question records")
    evaluate.add_argument("--out", required=True, help="report path (TSV; PNG written beside it)")

    sparql = sub.add_parser("sparql", help="emit the generated SPARQL only")
    sparql.add_argument("--kb", help="N-Triples file (defaults to the bundled fixture store)")
    sparql.add_argument("--question", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        resources = Resources.load(config)
    except (OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    if args.command == "eval":
        try:
            records = load_records(args.dataset)
            kb = load_kb(config, resources, args.kb)
            metrics, results = evaluate_dataset(records, kb, resources, config)
        except (OSError, ValueError, MissingGoldError) as exc:
            print(f"dataset error: {exc}", file=sys.stderr)
            return 3
        tsv_path, figure_path = write_report(metrics, results, args.out)
        print(render_table(metrics))
        print(f"\nreport: {tsv_path}\nfigure: {figure_path}")
        return 0

    try:
        record = _load_question(args.question)
    except (OSError, ValueError, KeyError) as exc:
        print(f"dataset error: bad question record: {exc}", file=sys.stderr)
        return 3
    try:
        kb = load_kb(config, resources, getattr(args, "kb", None))
    except (OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    result = answer_question(record, kb, resources, config)
    if args.command == "sparql":
        if result.error and not result.sparql:
            print(f"error: {result.error}", file=sys.stderr)
            return 3
        print(result.sparql)
        return 0

    print(f"question: {record.text or record.id}")
    print(f"sparql:   {result.sparql}")
    if result.error:
        print(f"error:    {result.error}")
    answers = ", ".join(result.answers) if result.answers else "(no answer)"
    print(f"answers:  {answers}")
    if args.trace:
        print("\ntrace:")
        for line in result.trace:
            print(f"  {line}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
