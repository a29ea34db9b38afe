"""Evaluation reports: delimited output, a console table, and a figure.

The TSV carries one row per question plus macro summary rows. Next to the
TSV, a bar chart of per-question precision/recall/F1 (with the macro F1
drawn as a reference line) is rendered to PNG.
"""

from __future__ import annotations

from pathlib import Path

from .pipeline import Metrics, PipelineResult

__all__ = ["render_figure", "render_table", "write_report"]


def write_tsv(metrics: Metrics, results: list[PipelineResult], path: Path) -> None:
    lines = ["id\tprecision\trecall\tf1\tanswers\terror"]
    by_id = {r.id: r for r in results}
    for q in metrics.per_question:
        result = by_id.get(q.id)
        answers = "|".join(result.answers) if result else ""
        error = result.error or "" if result else ""
        lines.append(f"{q.id}\t{q.precision:.6f}\t{q.recall:.6f}\t{q.f1:.6f}\t{answers}\t{error}")
    lines.append(f"macro\t{metrics.macro_precision:.6f}\t{metrics.macro_recall:.6f}\t{metrics.macro_f1:.6f}\t\t")
    lines.append(f"macro-f1-qald\t\t\t{metrics.macro_f1_qald:.6f}\t\t")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_table(metrics: Metrics) -> str:
    width = max([len("question")] + [len(q.id) for q in metrics.per_question])
    header = f"{'question':<{width}}  {'P':>6}  {'R':>6}  {'F1':>6}"
    rows = [header, "-" * len(header)]
    for q in metrics.per_question:
        rows.append(f"{q.id:<{width}}  {q.precision:>6.3f}  {q.recall:>6.3f}  {q.f1:>6.3f}")
    rows.append("-" * len(header))
    rows.append(
        f"{'macro':<{width}}  {metrics.macro_precision:>6.3f}  "
        f"{metrics.macro_recall:>6.3f}  {metrics.macro_f1:>6.3f}"
    )
    rows.append(f"{'macro-F1-QALD':<{width}}  {'':>6}  {'':>6}  {metrics.macro_f1_qald:>6.3f}")
    return "\n".join(rows)


def render_figure(metrics: Metrics, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ids = [q.id for q in metrics.per_question]
    x = range(len(ids))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(ids)), 3.6))
    ax.bar([i - width for i in x], [q.precision for q in metrics.per_question], width, label="precision")
    ax.bar(list(x), [q.recall for q in metrics.per_question], width, label="recall")
    ax.bar([i + width for i in x], [q.f1 for q in metrics.per_question], width, label="F1")
    ax.axhline(metrics.macro_f1, color="black", linewidth=0.8, linestyle="--",
               label=f"macro F1 = {metrics.macro_f1:.3f}")
    ax.set_xticks(list(x))
    ax.set_xticklabels(ids, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(metrics: Metrics, results: list[PipelineResult], out: str | Path) -> tuple[Path, Path]:
    """Write ``<out>.tsv``-style delimited output plus a PNG figure beside
    it; returns both paths."""
    out = Path(out)
    tsv_path = out if out.suffix == ".tsv" else out.with_suffix(".tsv")
    tsv_path.parent.mkdir(parents=True, exist_ok=True)
    write_tsv(metrics, results, tsv_path)
    figure_path = tsv_path.with_suffix(".png")
    render_figure(metrics, figure_path)
    return tsv_path, figure_path
