"""NER dataset handling: label simplification, splits, macro-F1 scoring.

Datasets use a two-column format (token, label; blank line between
sentences) with labels simplified to PER, LOC, ORG and O. Scoring is
token-level: per-class precision/recall/F1 with the 0/0 -> 0 convention,
macro-averaged over the three entity classes, O excluded.
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, ParseError

logger = logging.getLogger(__name__)

ENTITY_LABELS = ("PER", "LOC", "ORG")
OUTSIDE = "O"
ALL_LABELS = ENTITY_LABELS + (OUTSIDE,)

_BIO_PREFIXES = ("B-", "I-", "E-", "S-", "U-", "L-")


@dataclass
class NerSentence:
    tokens: list[str]
    labels: list[str]

    def __post_init__(self):
        if len(self.tokens) != len(self.labels) or not self.tokens:
            raise ValueError("tokens and labels must be non-empty and equal length")


@dataclass(frozen=True)
class LabelStats:
    per: int
    loc: int
    org: int
    n: int

    @property
    def density(self) -> float:
        if self.n == 0:
            return 0.0
        return (self.per + self.loc + self.org) / self.n

    def as_dict(self) -> dict:
        return {
            "PER": self.per,
            "LOC": self.loc,
            "ORG": self.org,
            "N": self.n,
            "density": round(self.density, 3),
        }


@dataclass(frozen=True)
class SplitSpec:
    fraction: float = 0.9  # train share
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ValueError(f"train fraction must be in (0, 1), got {self.fraction}")


@dataclass(frozen=True)
class RunScore:
    f1_per: float
    f1_loc: float
    f1_org: float
    run: int = 0

    @property
    def macro_f1(self) -> float:
        return (self.f1_per + self.f1_loc + self.f1_org) / 3.0

    def as_dict(self) -> dict:
        return {
            "run": self.run,
            "f1_PER": self.f1_per,
            "f1_LOC": self.f1_loc,
            "f1_ORG": self.f1_org,
            "macro_f1": self.macro_f1,
        }


@dataclass
class ParsedNer:
    sentences: list[NerSentence]
    unmapped: int  # labels that fell through to O with a warning


def simplify_label(raw: str, label_map: Mapping[str, str] | None) -> tuple[str, bool]:
    """Map a raw dataset label to the common set; True when it fell through.

    Lookup order: explicit map entry, identity for labels already in the
    common set, then (only without an explicit map) BIO/IOBES prefix
    stripping. Anything left maps to O and counts as unmapped.
    """
    if label_map is not None and raw in label_map:
        return label_map[raw], False
    if raw in ALL_LABELS:
        return raw, False
    if label_map is None:
        for prefix in _BIO_PREFIXES:
            if raw.startswith(prefix) and raw[len(prefix):] in ENTITY_LABELS:
                return raw[len(prefix):], False
    return OUTSIDE, True


def parse_ner(path: str | Path, label_map: Mapping[str, str] | None = None) -> ParsedNer:
    """Parse a two-column NER file, simplifying labels as configured."""
    path = Path(path)
    sentences: list[NerSentence] = []
    tokens: list[str] = []
    labels: list[str] = []
    unmapped = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if tokens:
                    sentences.append(NerSentence(tokens, labels))
                    tokens, labels = [], []
                continue
            columns = line.split()
            if len(columns) != 2:
                raise ParseError(path, line_no, f"expected 2 columns, got {len(columns)}")
            token, raw_label = columns
            label, fell_through = simplify_label(raw_label, label_map)
            if fell_through:
                unmapped += 1
                logger.warning("%s:%d: unmapped label %r -> O", path, line_no, raw_label)
            tokens.append(token)
            labels.append(label)
    if tokens:
        sentences.append(NerSentence(tokens, labels))
    return ParsedNer(sentences, unmapped)


def read_label_map(path: str | Path) -> dict[str, str]:
    """Read a two-column raw->simplified label map file."""
    path = Path(path)
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            columns = line.split()
            if len(columns) != 2:
                raise ParseError(path, line_no, f"expected 2 columns, got {len(columns)}")
            raw, simplified = columns
            if simplified not in ALL_LABELS:
                raise ParseError(path, line_no, f"target label must be one of {ALL_LABELS}")
            mapping[raw] = simplified
    return mapping


def write_ner(sentences: Iterable[NerSentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        first = True
        for sent in sentences:
            if not first:
                fh.write("\n")
            first = False
            for token, label in zip(sent.tokens, sent.labels):
                fh.write(f"{token}\t{label}\n")


def label_stats(sentences: Iterable[NerSentence]) -> LabelStats:
    """Token-level label counts and entity density."""
    per = loc = org = n = 0
    for sent in sentences:
        n += len(sent.labels)
        for label in sent.labels:
            if label == "PER":
                per += 1
            elif label == "LOC":
                loc += 1
            elif label == "ORG":
                org += 1
    return LabelStats(per, loc, org, n)


def split(
    sentences: Sequence[NerSentence], spec: SplitSpec
) -> tuple[list[NerSentence], list[NerSentence]]:
    """Deterministic seeded split into train and test sentence lists.

    Test size is round((1 - fraction) * N) with ties rounding up, floored
    at 1. The permutation comes from a frozen-generator shuffle, so a seed
    pins the split across runs and platforms.
    """
    n = len(sentences)
    if n < 2:
        raise ValueError(f"need at least 2 sentences to split, got {n}")
    # n - fraction*n, not (1-fraction)*n: the latter loses the half-way
    # cases to rounding (e.g. 0.1 * 95 -> 9.499...).
    test_size = max(1, math.floor(n - spec.fraction * n + 0.5))
    key = np.array([spec.seed & 0xFFFFFFFF, (spec.seed >> 32) & 0xFFFFFFFF], dtype=np.uint32)
    perm = np.random.RandomState(key).permutation(n)
    train_idx = perm[: n - test_size]
    test_idx = perm[n - test_size :]
    return [sentences[i] for i in train_idx], [sentences[i] for i in test_idx]


def _f1(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def macro_f1(gold: Sequence[NerSentence], pred: Sequence[NerSentence], run: int = 0) -> RunScore:
    """Token-level macro-F1 over the three entity classes.

    Gold and predictions must align sentence-by-sentence and token-by-token;
    the first divergence is reported.
    """
    if len(gold) != len(pred):
        raise AlignmentError(
            f"sentence count mismatch: gold {len(gold)}, predictions {len(pred)}"
        )
    tp = {c: 0 for c in ENTITY_LABELS}
    fp = {c: 0 for c in ENTITY_LABELS}
    fn = {c: 0 for c in ENTITY_LABELS}
    for si, (g, p) in enumerate(zip(gold, pred)):
        if len(g.tokens) != len(p.tokens):
            raise AlignmentError(
                f"sentence {si}: token count mismatch ({len(g.tokens)} vs {len(p.tokens)})"
            )
        for ti, (gt, pt) in enumerate(zip(g.tokens, p.tokens)):
            if gt != pt:
                raise AlignmentError(
                    f"sentence {si}, token {ti}: text mismatch ({gt!r} vs {pt!r})"
                )
        for gl, pl in zip(g.labels, p.labels):
            if gl == pl:
                if gl in tp:
                    tp[gl] += 1
            else:
                if pl in fp:
                    fp[pl] += 1
                if gl in fn:
                    fn[gl] += 1
    return RunScore(
        f1_per=_f1(tp["PER"], fp["PER"], fn["PER"]),
        f1_loc=_f1(tp["LOC"], fp["LOC"], fn["LOC"]),
        f1_org=_f1(tp["ORG"], fp["ORG"], fn["ORG"]),
        run=run,
    )


@dataclass
class RunSummary:
    runs: list[RunScore]
    mean: RunScore
    std_macro: float

    def as_dict(self) -> dict:
        return {
            "runs": [r.as_dict() for r in self.runs],
            "mean": self.mean.as_dict(),
            "std_macro_f1": self.std_macro,
        }


def aggregate_runs(scores: Sequence[RunScore]) -> RunSummary:
    """Component-wise mean over runs plus the sample stddev of macro-F1."""
    if not scores:
        raise ValueError("need at least one run to aggregate")
    mean = RunScore(
        f1_per=sum(s.f1_per for s in scores) / len(scores),
        f1_loc=sum(s.f1_loc for s in scores) / len(scores),
        f1_org=sum(s.f1_org for s in scores) / len(scores),
        run=-1,
    )
    macros = [s.macro_f1 for s in scores]
    std = statistics.stdev(macros) if len(macros) > 1 else 0.0
    return RunSummary(runs=list(scores), mean=mean, std_macro=std)


def relative_difference(a: float, b: float) -> float:
    """(a - b) / b: the relative gain of a candidate score over a baseline."""
    if b == 0:
        raise ValueError("relative difference is undefined for a zero baseline")
    return (a - b) / b
