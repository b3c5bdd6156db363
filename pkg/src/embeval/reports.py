"""Report emission: JSON, TSV and markdown tables with stable column order.

The markdown shapes mirror the two summary layouts used throughout the
toolkit: analogy results as languages x (layer x sem/syn) and NER results
as languages x systems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .analogy import CategoryResult
from .embstore import LAYERS
from .ner import RunSummary

JSON = "json"
TSV = "tsv"
MARKDOWN = "markdown-table"
FORMATS = (JSON, TSV, MARKDOWN)


@dataclass
class Report:
    """A rectangular report: ordered headers and one row per entry."""

    headers: list[str]
    rows: list[list]

    def to_json(self) -> str:
        payload = [dict(zip(self.headers, row)) for row in self.rows]
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=False) + "\n"

    def to_tsv(self) -> str:
        lines = ["\t".join(self.headers)]
        for row in self.rows:
            lines.append("\t".join(_cell(v, markdown=False) for v in row))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = [
            "| " + " | ".join(self.headers) + " |",
            "|" + "|".join(" --- " for _ in self.headers) + "|",
        ]
        for row in self.rows:
            lines.append("| " + " | ".join(_cell(v, markdown=True) for v in row) + " |")
        return "\n".join(lines) + "\n"


def _cell(value, markdown: bool) -> str:
    if isinstance(value, float):
        return f"{value:.2f}" if markdown else f"{value:.4f}"
    return str(value)


def emit_report(report: Report, fmt: str, path: str | Path) -> None:
    """Write the report in one of the supported formats."""
    if fmt == JSON:
        text = report.to_json()
    elif fmt == TSV:
        text = report.to_tsv()
    elif fmt == MARKDOWN:
        text = report.to_markdown()
    else:
        raise ValueError(f"unknown report format {fmt!r}, expected one of {FORMATS}")
    Path(path).write_text(text, encoding="utf-8")


def read_report_json(path: str | Path) -> list[dict]:
    """Parse a report written in JSON format back into its rows."""
    return json.loads(Path(path).read_text(encoding="utf-8"))


def analogy_category_report(results: Sequence[CategoryResult], ns: Sequence[int]) -> Report:
    """Per-category accuracies plus per-kind aggregate rows."""
    headers = ["category", "kind", "asked", "skipped_oov"] + [f"accuracy@{n}" for n in ns]
    rows = []
    for res in results:
        rows.append(
            [res.category, res.kind, res.asked, res.skipped_oov]
            + [res.accuracy(n) for n in ns]
        )
    for kind in ("semantic", "syntactic"):
        group = [r for r in results if r.kind == kind]
        if not group:
            continue
        rows.append(
            [f"all-{kind}", kind, sum(r.asked for r in group), sum(r.skipped_oov for r in group)]
            + [sum(r.accuracy(n) for r in group) / len(group) for n in ns]
        )
    return Report(headers, rows)


def analogy_layer_table(
    per_language: Mapping[str, Mapping[str, tuple[float, float]]],
    layers: Sequence[str] = LAYERS,
) -> Report:
    """Languages x (layer x sem/syn) summary; one row per language.

    ``per_language`` maps language -> layer -> (semantic, syntactic).
    """
    headers = ["language"]
    for layer in layers:
        headers += [f"{layer}-sem", f"{layer}-syn"]
    rows = []
    for lang, by_layer in per_language.items():
        row: list = [lang]
        for layer in layers:
            sem, syn = by_layer[layer]
            row += [sem, syn]
        rows.append(row)
    return Report(headers, rows)


def ner_system_table(
    per_language: Mapping[str, Mapping[str, float]], systems: Sequence[str]
) -> Report:
    """Languages x systems macro-F1 summary; one row per language."""
    headers = ["language"] + list(systems)
    rows = []
    for lang, scores in per_language.items():
        rows.append([lang] + [scores.get(system, float("nan")) for system in systems])
    return Report(headers, rows)


def ner_score_report(summary: RunSummary) -> Report:
    """Per-run scores plus mean and sample stddev rows."""
    headers = ["run", "f1_PER", "f1_LOC", "f1_ORG", "macro_f1"]
    rows = []
    for score in summary.runs:
        d = score.as_dict()
        rows.append([d["run"], d["f1_PER"], d["f1_LOC"], d["f1_ORG"], d["macro_f1"]])
    mean = summary.mean.as_dict()
    rows.append(["mean", mean["f1_PER"], mean["f1_LOC"], mean["f1_ORG"], mean["macro_f1"]])
    rows.append(["std", "", "", "", summary.std_macro])
    return Report(headers, rows)


def ner_comparison_report(rows: Sequence[Mapping], baseline_system: str) -> Report:
    """Relative difference of each system against the baseline, per language.

    Each input row carries language, system, macro_f1 and the (density,
    size) covariates used for correlation-style plots.
    """
    from .ner import relative_difference

    headers = [
        "language",
        "system",
        "macro_f1",
        "baseline",
        "baseline_macro_f1",
        "relative_difference",
        "density",
        "size",
    ]
    baselines: dict[str, float] = {}
    for row in rows:
        if row["system"] == baseline_system:
            baselines[row["language"]] = float(row["macro_f1"])
    out = []
    for row in rows:
        if row["system"] == baseline_system:
            continue
        lang = row["language"]
        if lang not in baselines:
            raise ValueError(f"no {baseline_system!r} baseline score for language {lang!r}")
        base = baselines[lang]
        out.append(
            [
                lang,
                row["system"],
                float(row["macro_f1"]),
                baseline_system,
                base,
                relative_difference(float(row["macro_f1"]), base),
                float(row.get("density", float("nan"))),
                int(row.get("size", 0)),
            ]
        )
    return Report(headers, out)
