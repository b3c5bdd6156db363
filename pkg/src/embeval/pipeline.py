"""Pipeline orchestration: config file, stage graph, reproducibility manifests.

Configuration is one INI file (sections per stage) with command-line
overrides taking precedence. Stages run in dependency order; every stage
writes its artifacts atomically (a ``.partial`` file is left behind on
failure) plus a manifest recording parameter values and SHA-256 digests of
inputs and outputs, so identical configs reproduce identical bytes.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
from pathlib import Path

from . import analogy, corpus, dedup, embstore, ner, reports, vocab
from .errors import ToolkitError

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "EMBEVAL_CONFIG"

STAGE_ORDER = ("tokenize", "dedup", "vocab", "average", "eval", "ner")


class ConfigError(ToolkitError):
    """Invalid or incomplete pipeline configuration."""


class PipelineConfig:
    """Sectioned key-value configuration with override support."""

    def __init__(self, sections: dict[str, dict[str, str]]):
        self.sections = sections

    @classmethod
    def from_file(cls, path: str | Path, overrides: list[str] | None = None) -> "PipelineConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        sections = {name: dict(parser[name]) for name in parser.sections()}
        cfg = cls(sections)
        for item in overrides or []:
            cfg.apply_override(item)
        return cfg

    def apply_override(self, item: str) -> None:
        """Apply one ``section.key=value`` override; flags win over the file."""
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        self.sections.setdefault(section, {})[key.strip()] = value.strip()

    def get(self, section: str, key: str, fallback: str | None = None) -> str | None:
        return self.sections.get(section, {}).get(key, fallback)

    def require(self, section: str, key: str) -> str:
        value = self.get(section, key)
        if value is None or value == "":
            raise ConfigError(f"missing required config value [{section}] {key}")
        return value

    def get_int(self, section: str, key: str, fallback: int | None = None) -> int | None:
        value = self.get(section, key)
        if value is None or value == "":
            return fallback
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be an integer, got {value!r}") from None

    def get_float(self, section: str, key: str, fallback: float | None = None) -> float | None:
        value = self.get(section, key)
        if value is None or value == "":
            return fallback
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be a number, got {value!r}") from None

    def params(self, section: str) -> dict[str, str]:
        return dict(self.sections.get(section, {}))


def default_config_path() -> str | None:
    return os.environ.get(CONFIG_ENV_VAR)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class _Stage:
    """Declarative stage description used for validation and execution."""

    def __init__(self, name, inputs, outputs, run):
        self.name = name
        self.inputs = inputs  # list of (section, key, required)
        self.outputs = outputs  # list of (section, key)
        self.run = run


def _stage_inputs(cfg: PipelineConfig, stage: _Stage) -> list[Path]:
    paths = []
    for section, key, required in stage.inputs:
        value = cfg.get(section, key)
        if value is None or value == "":
            if required:
                raise ConfigError(f"stage {stage.name!r} needs [{section}] {key}")
            continue
        paths.append(Path(value))
    return paths


def _stage_outputs(cfg: PipelineConfig, stage: _Stage) -> list[Path]:
    paths = []
    for section, key in stage.outputs:
        value = cfg.require(section, key)
        paths.append(Path(value))
    return paths


def _run_tokenize(cfg: PipelineConfig, out_paths: list[Path]) -> dict:
    lang = cfg.get("pipeline", "lang", "en")
    fmt = cfg.get("tokenize", "format", corpus.RAW)
    reader = corpus.load_corpus(cfg.require("tokenize", "input"), fmt)
    workers = cfg.get_int("pipeline", "threads", 1)
    if fmt == corpus.RAW:
        rules = corpus.load_rules(lang)
        docs = corpus.tokenize_documents(reader, rules, workers=workers)
    else:
        docs = iter(reader)
    tokens = corpus.emit_lines(docs, out_paths[0])
    return {"tokens": tokens, "replaced_bytes": reader.replacement_count}


def _run_dedup(cfg: PipelineConfig, out_paths: list[Path]) -> dict:
    dcfg = dedup.DedupConfig(
        n=cfg.get_int("dedup", "n", 9),
        threshold=cfg.get_float("dedup", "threshold", 0.9),
        unit=cfg.get("dedup", "unit", dedup.PARAGRAPH),
    )
    stats = dedup.dedup_file(cfg.require("dedup", "input"), out_paths[0], dcfg, out_paths[1])
    return stats.as_dict()


def _run_vocab(cfg: PipelineConfig, out_paths: list[Path]) -> dict:
    with open(cfg.require("vocab", "input"), encoding="utf-8") as fh:
        counts = vocab.count_tokens(fh)
    total = sum(counts.values())
    min_count = cfg.get_int("vocab", "min_count", vocab.default_min_count(total))
    entries = vocab.build_vocab(counts, min_count, cfg.get_int("vocab", "max_size"))
    with_counts = (cfg.get("vocab", "with_counts", "false") or "").lower() == "true"
    vocab.write_vocab(entries, out_paths[0], with_counts=with_counts)
    return {"total_tokens": total, "min_count": min_count, "vocab_size": len(entries)}


def _run_average(cfg: PipelineConfig, out_paths: list[Path]) -> dict:
    vocab_path = cfg.get("average", "vocab")
    vocab_filter = set(vocab.read_vocab(vocab_path)) if vocab_path else None
    records = embstore.ingest_records(cfg.require("average", "records"))
    layer = cfg.get("average", "layer", "LSTM1")
    shards = cfg.get_int("pipeline", "threads", 1)
    emb = embstore.average_occurrences(records, layer, vocab_filter, shards=shards)
    embstore.save_static(emb, out_paths[0])
    return {"layer": layer, "words": len(emb), "dim": emb.dim}


def _run_eval(cfg: PipelineConfig, out_paths: list[Path]) -> dict:
    emb = embstore.load_static(cfg.require("eval", "embeddings"))
    questions = analogy.parse_analogy_dataset(cfg.require("eval", "dataset"))
    ns = [int(x) for x in (cfg.get("eval", "topn", "1,5") or "").split(",") if x]
    limit = cfg.get_int("eval", "candidates")
    if limit is not None:
        limit = min(limit, len(emb))
    results = analogy.method_a_evaluate(emb, questions, candidate_limit=limit, ns=ns)
    fmt = cfg.get("eval", "format", reports.JSON)
    reports.emit_report(reports.analogy_category_report(results, ns), fmt, out_paths[0])
    summary = {}
    kinds = {r.kind for r in results}
    if analogy.SEMANTIC in kinds and analogy.SYNTACTIC in kinds:
        for n in ns:
            sem, syn = analogy.aggregate(results, n)
            summary[f"sem@{n}"] = sem
            summary[f"syn@{n}"] = syn
    return summary


def _run_ner(cfg: PipelineConfig, out_paths: list[Path]) -> dict:
    map_path = cfg.get("ner", "label_map")
    label_map = ner.read_label_map(map_path) if map_path else None
    parsed = ner.parse_ner(cfg.require("ner", "dataset"), label_map)
    stats = ner.label_stats(parsed.sentences)
    spec = ner.SplitSpec(
        fraction=cfg.get_float("ner", "fraction", 0.9),
        seed=cfg.get_int("ner", "seed", 0),
    )
    train, test = ner.split(parsed.sentences, spec)
    payload = dict(stats.as_dict())
    payload.update(
        {"sentences": len(parsed.sentences), "unmapped_labels": parsed.unmapped,
         "train_sentences": len(train), "test_sentences": len(test),
         "split_seed": spec.seed, "train_fraction": spec.fraction}
    )
    out_paths[0].write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    ner.write_ner(train, out_paths[1])
    ner.write_ner(test, out_paths[2])
    return {"train": len(train), "test": len(test)}


STAGES = {
    "tokenize": _Stage(
        "tokenize",
        inputs=[("tokenize", "input", True)],
        outputs=[("tokenize", "output")],
        run=_run_tokenize,
    ),
    "dedup": _Stage(
        "dedup",
        inputs=[("dedup", "input", True)],
        outputs=[("dedup", "output"), ("dedup", "stats")],
        run=_run_dedup,
    ),
    "vocab": _Stage(
        "vocab",
        inputs=[("vocab", "input", True)],
        outputs=[("vocab", "output")],
        run=_run_vocab,
    ),
    "average": _Stage(
        "average",
        inputs=[("average", "records", True), ("average", "vocab", False)],
        outputs=[("average", "output")],
        run=_run_average,
    ),
    "eval": _Stage(
        "eval",
        inputs=[("eval", "embeddings", True), ("eval", "dataset", True)],
        outputs=[("eval", "report")],
        run=_run_eval,
    ),
    "ner": _Stage(
        "ner",
        inputs=[("ner", "dataset", True), ("ner", "label_map", False)],
        outputs=[("ner", "stats_report"), ("ner", "train_output"), ("ner", "test_output")],
        run=_run_ner,
    ),
}


def requested_stages(cfg: PipelineConfig, stages: list[str] | None) -> list[str]:
    if stages:
        unknown = [s for s in stages if s not in STAGES]
        if unknown:
            raise ConfigError(f"unknown stage(s): {', '.join(unknown)}")
        return [s for s in STAGE_ORDER if s in stages]
    configured = [s for s in STAGE_ORDER if s in cfg.sections]
    if not configured:
        raise ConfigError("config defines no pipeline stages")
    return configured


def validate(cfg: PipelineConfig, stages: list[str]) -> None:
    """Check every referenced path before any stage does work.

    An input may either exist on disk already or be produced by an earlier
    requested stage of the same run.
    """
    produced: set[Path] = set()
    for name in stages:
        stage = STAGES[name]
        for path in _stage_inputs(cfg, stage):
            if path in produced or path.exists():
                continue
            raise ConfigError(f"stage {name!r}: input path does not exist: {path}")
        produced.update(_stage_outputs(cfg, stage))


def run_pipeline(cfg: PipelineConfig, stages: list[str] | None = None) -> int:
    """Run the requested stages in dependency order.

    Returns 0 when every stage succeeded. A failing stage leaves its
    unfinished outputs behind with a ``.partial`` suffix and aborts the
    rest of the run.
    """
    names = requested_stages(cfg, stages)
    validate(cfg, names)
    for name in names:
        stage = STAGES[name]
        in_paths = _stage_inputs(cfg, stage)
        out_paths = _stage_outputs(cfg, stage)
        partial = [p.with_name(p.name + ".partial") for p in out_paths]
        logger.info("stage %s: starting", name)
        try:
            details = stage.run(cfg, partial)
        except Exception as exc:
            logger.error("stage %s failed: %s", name, exc)
            return 1
        for tmp, final in zip(partial, out_paths):
            os.replace(tmp, final)
        manifest = {
            "stage": name,
            "params": cfg.params(name),
            "inputs": {str(p): _sha256(p) for p in in_paths},
            "outputs": {str(p): _sha256(p) for p in out_paths},
            "details": details,
        }
        manifest_path = out_paths[0].with_name(out_paths[0].name + ".manifest.json")
        manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        logger.info("stage %s: done %s", name, details)
    return 0
