"""Command-line entry point wiring all pipeline stages and evaluations."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import analogy, corpus, dedup, embstore, ner, pipeline, reports, vocab
from .errors import ToolkitError

logger = logging.getLogger(__name__)

_FORMAT_ALIASES = {
    "raw": corpus.RAW,
    "raw-text": corpus.RAW,
    "pretok": corpus.PRETOKENIZED,
    "pretokenized-lines": corpus.PRETOKENIZED,
}


def _add_report_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--report", required=True, help="report output path")
    parser.add_argument(
        "--format", default=reports.JSON, choices=reports.FORMATS, help="report format"
    )


def _parse_topn(value: str) -> list[int]:
    ns = [int(x) for x in value.split(",") if x.strip()]
    if not ns or any(n < 1 for n in ns):
        raise argparse.ArgumentTypeError("topn must be a comma-separated list of ints >= 1")
    return sorted(set(ns))


def _cmd_corpus_tokenize(args: argparse.Namespace) -> int:
    fmt = _FORMAT_ALIASES[args.format]
    reader = corpus.load_corpus(args.infile, fmt)
    if fmt == corpus.RAW:
        rules = corpus.load_rules(args.lang)
        docs = corpus.tokenize_documents(reader, rules, workers=args.workers)
    else:
        docs = iter(reader)
    tokens = corpus.emit_lines(docs, args.outfile)
    print(f"wrote {tokens} tokens to {args.outfile}")
    if reader.replacement_count:
        print(f"warning: replaced {reader.replacement_count} invalid UTF-8 sequence(s)", file=sys.stderr)
    return 0


def _cmd_dedup(args: argparse.Namespace) -> int:
    cfg = dedup.DedupConfig(n=args.n, threshold=args.threshold, unit=args.unit)
    stats = dedup.dedup_file(args.infile, args.outfile, cfg, args.stats)
    print(
        f"kept {stats.units_kept}/{stats.units_in} units, "
        f"{stats.tokens_kept}/{stats.tokens_in} tokens"
    )
    return 0


def _cmd_vocab_build(args: argparse.Namespace) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        counts = vocab.count_tokens(fh)
    total = sum(counts.values())
    min_count = args.min_count if args.min_count else vocab.default_min_count(total)
    entries = vocab.build_vocab(counts, min_count, args.max_size)
    vocab.write_vocab(entries, args.outfile, with_counts=args.with_counts)
    print(f"{len(entries)} tokens (min_count={min_count}) from {total} corpus tokens")
    return 0


def _cmd_emb_average(args: argparse.Namespace) -> int:
    vocab_filter = set(vocab.read_vocab(args.vocab)) if args.vocab else None
    records = embstore.ingest_records(args.records)
    emb = embstore.average_occurrences(records, args.layer, vocab_filter, shards=args.shards)
    embstore.save_static(emb, args.outfile)
    print(f"averaged {len(emb)} words at layer {args.layer} (d={emb.dim})")
    return 0


def _write_analogy_reports(results, ns, args) -> None:
    reports.emit_report(reports.analogy_category_report(results, ns), args.format, args.report)
    kinds = {r.kind for r in results}
    if analogy.SEMANTIC in kinds and analogy.SYNTACTIC in kinds:
        for n in ns:
            sem, syn = analogy.aggregate(results, n)
            print(f"accuracy@{n}: semantic {sem:.4f}, syntactic {syn:.4f}")


def _cmd_analogy_eval_a(args: argparse.Namespace) -> int:
    emb = embstore.load_static(args.emb)
    questions = analogy.parse_analogy_dataset(args.dataset)
    limit = min(args.candidates, len(emb)) if args.candidates else None
    results = analogy.method_a_evaluate(emb, questions, candidate_limit=limit, ns=args.topn)
    _write_analogy_reports(results, args.topn, args)
    return 0


def _method_b_vocab(questions, vocab_path: str | None) -> list[str]:
    """Dataset words in first-appearance order, plus optional external file."""
    words: list[str] = []
    seen: set[str] = set()
    for q in questions:
        for w in (q.a, q.b, q.c, q.d):
            if w not in seen:
                seen.add(w)
                words.append(w)
    if vocab_path:
        for w in vocab.read_vocab(vocab_path):
            if w not in seen:
                seen.add(w)
                words.append(w)
    return words


def _cmd_analogy_eval_b(args: argparse.Namespace) -> int:
    questions = analogy.parse_analogy_dataset(args.dataset)
    if args.template:
        spec = analogy.read_template_file(args.template, args.lang)
    else:
        spec = analogy.load_template(args.lang)
    words = _method_b_vocab(questions, args.vocab)
    if args.emit_requests:
        sentences, _ = analogy.build_requests(questions, spec, words)
        count = analogy.write_request_file(sentences, args.emit_requests)
        print(f"wrote {count} sentences to {args.emit_requests}")
        return 0
    if args.provider:
        provider = analogy.SubprocessProvider(args.provider.split())
    elif args.records:
        provider = analogy.PrecomputedProvider(args.records)
    else:
        print("error: eval-b needs --provider, --records or --emit-requests", file=sys.stderr)
        return 2
    results = analogy.method_b_evaluate(
        provider,
        questions,
        spec,
        words,
        cfg=analogy.CslsConfig(k=args.csls_k),
        ns=args.topn,
        layer=args.layer,
        ranking=args.ranking,
    )
    _write_analogy_reports(results, args.topn, args)
    return 0


def _cmd_ner_stats(args: argparse.Namespace) -> int:
    label_map = ner.read_label_map(args.label_map) if args.label_map else None
    parsed = ner.parse_ner(args.infile, label_map)
    stats = ner.label_stats(parsed.sentences)
    payload = dict(stats.as_dict())
    payload["sentences"] = len(parsed.sentences)
    payload["unmapped_labels"] = parsed.unmapped
    Path(args.report).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_ner_split(args: argparse.Namespace) -> int:
    label_map = ner.read_label_map(args.label_map) if args.label_map else None
    parsed = ner.parse_ner(args.infile, label_map)
    spec = ner.SplitSpec(fraction=args.fraction, seed=args.seed)
    train, test = ner.split(parsed.sentences, spec)
    ner.write_ner(train, args.train_out)
    ner.write_ner(test, args.test_out)
    print(f"split {len(parsed.sentences)} sentences into {len(train)} train / {len(test)} test")
    return 0


def _cmd_ner_score(args: argparse.Namespace) -> int:
    gold = ner.parse_ner(args.gold).sentences
    pred = ner.parse_ner(args.pred).sentences
    score = ner.macro_f1(gold, pred, run=args.run)
    summary = ner.aggregate_runs([score])
    reports.emit_report(reports.ner_score_report(summary), args.format, args.report)
    print(f"macro_f1 {score.macro_f1:.4f}")
    return 0


def _cmd_ner_compare(args: argparse.Namespace) -> int:
    with open(args.scores, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t"))
    report = reports.ner_comparison_report(rows, args.baseline)
    reports.emit_report(report, args.format, args.report)
    print(f"compared {len(report.rows)} system/language pairs against {args.baseline}")
    return 0


def _cmd_pipeline_run(args: argparse.Namespace) -> int:
    config_path = args.config or pipeline.default_config_path()
    if not config_path:
        print(
            f"error: no config given and {pipeline.CONFIG_ENV_VAR} is not set",
            file=sys.stderr,
        )
        return 2
    cfg = pipeline.PipelineConfig.from_file(config_path, args.set or [])
    stages = args.stages.split(",") if args.stages else None
    return pipeline.run_pipeline(cfg, stages)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embeval",
        description="Corpus preprocessing and word-embedding evaluation toolkit",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_corpus = sub.add_parser("corpus", help="corpus ingestion and tokenization")
    corpus_sub = p_corpus.add_subparsers(dest="subcommand", required=True)
    p_tok = corpus_sub.add_parser("tokenize", help="tokenize into one-sentence-per-line format")
    p_tok.add_argument("--lang", required=True, help="language code, e.g. sl")
    p_tok.add_argument("--format", default="raw", choices=sorted(_FORMAT_ALIASES))
    p_tok.add_argument("--in", dest="infile", required=True)
    p_tok.add_argument("--out", dest="outfile", required=True)
    p_tok.add_argument("--workers", type=int, default=1)
    p_tok.set_defaults(func=_cmd_corpus_tokenize)

    p_dedup = sub.add_parser("dedup", help="near-duplicate removal")
    p_dedup.add_argument("--unit", default=dedup.PARAGRAPH, choices=dedup.UNITS)
    p_dedup.add_argument("--n", type=int, default=9)
    p_dedup.add_argument("--threshold", type=float, default=0.9)
    p_dedup.add_argument("--in", dest="infile", required=True)
    p_dedup.add_argument("--out", dest="outfile", required=True)
    p_dedup.add_argument("--stats", required=True, help="stats JSON output path")
    p_dedup.set_defaults(func=_cmd_dedup)

    p_vocab = sub.add_parser("vocab", help="vocabulary construction")
    vocab_sub = p_vocab.add_subparsers(dest="subcommand", required=True)
    p_vb = vocab_sub.add_parser("build", help="build a frequency-thresholded vocabulary")
    p_vb.add_argument("--min-count", type=int, default=0, help="0 = derive from corpus size")
    p_vb.add_argument("--max-size", type=int, default=None)
    p_vb.add_argument("--with-counts", action="store_true")
    p_vb.add_argument("--in", dest="infile", required=True)
    p_vb.add_argument("--out", dest="outfile", required=True)
    p_vb.set_defaults(func=_cmd_vocab_build)

    p_emb = sub.add_parser("emb", help="embedding stores")
    emb_sub = p_emb.add_subparsers(dest="subcommand", required=True)
    p_avg = emb_sub.add_parser("average", help="average contextual occurrences into static vectors")
    p_avg.add_argument("--layer", default="LSTM1", choices=embstore.LAYERS)
    p_avg.add_argument("--records", required=True)
    p_avg.add_argument("--vocab", default=None, help="optional vocabulary filter file")
    p_avg.add_argument("--out", dest="outfile", required=True)
    p_avg.add_argument("--shards", type=int, default=1)
    p_avg.set_defaults(func=_cmd_emb_average)

    p_an = sub.add_parser("analogy", help="word-analogy evaluation")
    an_sub = p_an.add_subparsers(dest="subcommand", required=True)
    p_a = an_sub.add_parser("eval-a", help="nearest-neighbor method over static vectors")
    p_a.add_argument("--emb", required=True, help="static embeddings (text format)")
    p_a.add_argument("--dataset", required=True)
    p_a.add_argument("--candidates", type=int, default=200_000)
    p_a.add_argument("--topn", type=_parse_topn, default=[1, 5])
    _add_report_args(p_a)
    p_a.set_defaults(func=_cmd_analogy_eval_a)

    p_b = an_sub.add_parser("eval-b", help="sentence-template method via an embedding provider")
    p_b.add_argument("--dataset", required=True)
    p_b.add_argument("--lang", default="en", help="template language")
    p_b.add_argument("--template", default=None, help="custom template file")
    p_b.add_argument("--vocab", default=None, help="extra candidate vocabulary file")
    p_b.add_argument("--provider", default=None, help="provider command line")
    p_b.add_argument("--records", default=None, help="precomputed record file")
    p_b.add_argument("--emit-requests", default=None, help="write request sentences and stop")
    p_b.add_argument("--layer", default="LSTM1", choices=embstore.LAYERS)
    p_b.add_argument("--csls-k", type=int, default=10)
    p_b.add_argument("--ranking", default="csls", choices=("csls", "cosine"))
    p_b.add_argument("--topn", type=_parse_topn, default=[1, 5])
    p_b.add_argument("--report", default=None)
    p_b.add_argument("--format", default=reports.JSON, choices=reports.FORMATS)
    p_b.set_defaults(func=_cmd_analogy_eval_b)

    p_ner = sub.add_parser("ner", help="NER datasets and scoring")
    ner_sub = p_ner.add_subparsers(dest="subcommand", required=True)
    p_ns = ner_sub.add_parser("stats", help="label counts and density")
    p_ns.add_argument("--in", dest="infile", required=True)
    p_ns.add_argument("--label-map", default=None)
    p_ns.add_argument("--report", required=True)
    p_ns.set_defaults(func=_cmd_ner_stats)

    p_sp = ner_sub.add_parser("split", help="seeded train/test split")
    p_sp.add_argument("--in", dest="infile", required=True)
    p_sp.add_argument("--label-map", default=None)
    p_sp.add_argument("--train-out", required=True)
    p_sp.add_argument("--test-out", required=True)
    p_sp.add_argument("--seed", type=int, default=0)
    p_sp.add_argument("--fraction", type=float, default=0.9)
    p_sp.set_defaults(func=_cmd_ner_split)

    p_sc = ner_sub.add_parser("score", help="macro-F1 of a prediction file")
    p_sc.add_argument("--gold", required=True)
    p_sc.add_argument("--pred", required=True)
    p_sc.add_argument("--run", type=int, default=0)
    _add_report_args(p_sc)
    p_sc.set_defaults(func=_cmd_ner_score)

    p_cmp = ner_sub.add_parser("compare", help="relative differences against a baseline system")
    p_cmp.add_argument("--scores", required=True, help="TSV: language system macro_f1 density size")
    p_cmp.add_argument("--baseline", required=True, help="baseline system name")
    _add_report_args(p_cmp)
    p_cmp.set_defaults(func=_cmd_ner_compare)

    p_pipe = sub.add_parser("pipeline", help="run configured stages with manifests")
    pipe_sub = p_pipe.add_subparsers(dest="subcommand", required=True)
    p_run = pipe_sub.add_parser("run")
    p_run.add_argument("--config", default=None, help=f"INI config (default ${pipeline.CONFIG_ENV_VAR})")
    p_run.add_argument("--stages", default=None, help="comma-separated subset of stages")
    p_run.add_argument("--set", action="append", default=None, metavar="SECTION.KEY=VALUE")
    p_run.set_defaults(func=_cmd_pipeline_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"fatal I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
