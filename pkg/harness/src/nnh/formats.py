"""File formats shared with the evaluation toolkit.

Token-embedding records: one per line,
``sentence_id<TAB>position<TAB>token<TAB>layer<TAB>v1 v2 ... vd`` with
layer in {CNN, LSTM1, LSTM2} and sentence ids counting request lines from
1. Labeled/predicted sentences: two columns (token, label), blank line
between sentences.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

LAYERS = ("CNN", "LSTM1", "LSTM2")
LABELS = ("PER", "LOC", "ORG", "O")


@dataclass
class Record:
    sentence_id: str
    position: int
    token: str
    layer: str
    vector: np.ndarray


def read_records(path: str | Path) -> Iterator[Record]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise ValueError(f"{path}:{line_no}: expected 5 fields, got {len(fields)}")
            sentence_id, pos_str, token, layer, payload = fields
            if layer not in LAYERS:
                raise ValueError(f"{path}:{line_no}: unknown layer {layer!r}")
            try:
                position = int(pos_str)
                vector = np.array(payload.split(), dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
            yield Record(sentence_id, position, token, layer, vector)


def write_records(records: Iterable[Record], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            payload = " ".join(repr(float(x)) for x in rec.vector)
            fh.write(f"{rec.sentence_id}\t{rec.position}\t{rec.token}\t{rec.layer}\t{payload}\n")
            count += 1
    return count


def read_labeled(path: str | Path) -> list[tuple[list[str], list[str]]]:
    """Two-column sentences as (tokens, labels) pairs."""
    sentences: list[tuple[list[str], list[str]]] = []
    tokens: list[str] = []
    labels: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if tokens:
                    sentences.append((tokens, labels))
                    tokens, labels = [], []
                continue
            columns = line.split()
            if len(columns) != 2:
                raise ValueError(f"{path}:{line_no}: expected 2 columns, got {len(columns)}")
            tokens.append(columns[0])
            labels.append(columns[1])
    if tokens:
        sentences.append((tokens, labels))
    return sentences


def write_labeled(sentences: Iterable[tuple[list[str], list[str]]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        first = True
        for tokens, labels in sentences:
            if not first:
                fh.write("\n")
            first = False
            for token, label in zip(tokens, labels):
                fh.write(f"{token}\t{label}\n")


def read_static_vectors(path: str | Path) -> dict[str, np.ndarray]:
    """Minimal word2vec text-format reader (optional header line)."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if line_no == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue  # header
            token = parts[0]
            try:
                vec = np.array(parts[1:], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
            vectors.setdefault(token, vec)
    if not vectors:
        raise ValueError(f"{path}: no vectors found")
    return vectors
