"""Static word vectors and per-occurrence contextual embedding records.

Static vectors use the word2vec text format (optional ``count dim`` header,
then one token and d floats per line). Contextual occurrences travel in a
line-oriented record file, one record per line::

    sentence_id<TAB>position<TAB>token<TAB>layer<TAB>v1 v2 ... vd

with layer one of CNN, LSTM1, LSTM2. Averaging the occurrence vectors of
each token turns such records into static embeddings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import ParseError, ToolkitError, ZeroVectorError

logger = logging.getLogger(__name__)

LAYERS = ("CNN", "LSTM1", "LSTM2")


class StaticEmbeddings:
    """An ordered vocabulary and its |V| x d matrix of word vectors."""

    def __init__(self, vocab: list[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or len(vocab) != matrix.shape[0]:
            raise ValueError("matrix shape does not match vocabulary length")
        if len(vocab) < 1:
            raise ValueError("embeddings must contain at least one word")
        if len(set(vocab)) != len(vocab):
            raise ValueError("duplicate tokens in vocabulary")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("embedding matrix contains non-finite values")
        self.vocab = list(vocab)
        self.matrix = matrix
        self.index = {token: i for i, token in enumerate(self.vocab)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.matrix[self.index[token]]


def load_static(path: str | Path, expected_dim: int | None = None) -> StaticEmbeddings:
    """Load word2vec-style text vectors.

    The header line is optional; dimensions must agree across rows and with
    ``expected_dim`` when given. Duplicate tokens keep the first occurrence
    and log a warning.
    """
    path = Path(path)
    vocab: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise ParseError(path, 1, "empty embedding file")
        start_line = 1
        parts = first.rstrip("\n").split()
        header_count = None
        if len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
            header_count = int(parts[0])
            dim = int(parts[1])
            start_line = 2
        else:
            fh.seek(0)
        for line_no, line in enumerate(fh, start=start_line):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(" ")
            token = fields[0]
            try:
                vec = np.array([float(x) for x in fields[1:] if x], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(path, line_no, f"bad float value: {exc}") from None
            if dim is None:
                dim = len(vec)
                if expected_dim is not None and dim != expected_dim:
                    raise ParseError(
                        path, line_no, f"dimension {len(vec)} does not match expected {expected_dim}"
                    )
            if len(vec) != dim:
                raise ParseError(
                    path, line_no, f"row has {len(vec)} components, expected {dim}"
                )
            if token in seen:
                logger.warning("%s:%d: duplicate token %r, keeping first", path, line_no, token)
                continue
            seen.add(token)
            vocab.append(token)
            rows.append(vec)
    if expected_dim is not None and dim != expected_dim:
        raise ParseError(path, 1, f"dimension {dim} does not match expected {expected_dim}")
    if header_count is not None and header_count != len(vocab):
        logger.warning(
            "%s: header declares %d rows, found %d", path, header_count, len(vocab)
        )
    if not vocab:
        raise ParseError(path, 1, "embedding file has no vector rows")
    return StaticEmbeddings(vocab, np.vstack(rows))


def save_static(emb: StaticEmbeddings, path: str | Path) -> None:
    """Write text-format vectors with a header; round-trips to 6 decimals."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(emb)} {emb.dim}\n")
        for token, row in zip(emb.vocab, emb.matrix):
            fh.write(token)
            for x in row:
                fh.write(f" {x:.6f}")
            fh.write("\n")


@dataclass
class TokenEmbeddingRecord:
    """One contextual vector for a (sentence, position, layer) occurrence."""

    sentence_id: str
    position: int
    token: str
    layer: str
    vector: np.ndarray


def ingest_records(path: str | Path) -> Iterator[TokenEmbeddingRecord]:
    """Stream records from a file, validating as it goes.

    Raises :class:`ParseError` with the offending line number on malformed
    lines, unknown layer names, or a dimension change within a layer.
    """
    path = Path(path)
    layer_dims: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise ParseError(path, line_no, f"expected 5 tab-separated fields, got {len(fields)}")
            sentence_id, pos_str, token, layer, vec_str = fields
            if layer not in LAYERS:
                raise ParseError(path, line_no, f"unknown layer {layer!r}, expected one of {LAYERS}")
            try:
                position = int(pos_str)
            except ValueError:
                raise ParseError(path, line_no, f"bad position {pos_str!r}") from None
            if position < 0:
                raise ParseError(path, line_no, f"negative position {position}")
            try:
                vector = np.array(vec_str.split(), dtype=np.float64)
            except ValueError:
                vector = None
            if vector is None or vector.size == 0 or not np.all(np.isfinite(vector)):
                raise ParseError(path, line_no, "bad vector payload")
            dim = layer_dims.setdefault(layer, vector.size)
            if vector.size != dim:
                raise ParseError(
                    path, line_no, f"layer {layer} dimension changed from {dim} to {vector.size}"
                )
            yield TokenEmbeddingRecord(sentence_id, position, token, layer, vector)


def write_records(records: Iterable[TokenEmbeddingRecord], path: str | Path) -> int:
    """Write records in the line format above; returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            values = " ".join(repr(float(x)) for x in rec.vector)
            fh.write(f"{rec.sentence_id}\t{rec.position}\t{rec.token}\t{rec.layer}\t{values}\n")
            count += 1
    return count


def average_occurrences(
    records: Iterable[TokenEmbeddingRecord],
    layer: str,
    vocab_filter: set[str] | None = None,
    shards: int = 1,
) -> StaticEmbeddings:
    """Average every token's occurrence vectors at one layer.

    Per-shard (sum, count) accumulators in double precision are merged in
    fixed shard order, so the result is stable for any shard count up to
    floating-point rounding. Token order in the result is first occurrence
    in the record stream.
    """
    if layer not in LAYERS:
        raise ValueError(f"unknown layer {layer!r}, expected one of {LAYERS}")
    if shards < 1:
        raise ValueError(f"shards must be >= 1, got {shards}")
    sums: list[dict[str, np.ndarray]] = [{} for _ in range(shards)]
    counts: list[dict[str, int]] = [{} for _ in range(shards)]
    order: list[str] = []
    seen_tokens: set[str] = set()
    index = 0
    dim: int | None = None
    for rec in records:
        if rec.layer != layer:
            continue
        if vocab_filter is not None and rec.token not in vocab_filter:
            continue
        if dim is None:
            dim = rec.vector.shape[0]
        elif rec.vector.shape[0] != dim:
            raise ToolkitError(
                f"record dimension changed from {dim} to {rec.vector.shape[0]} at layer {layer}"
            )
        shard = index % shards
        index += 1
        if rec.token not in seen_tokens:
            seen_tokens.add(rec.token)
            order.append(rec.token)
        acc = sums[shard].get(rec.token)
        if acc is None:
            sums[shard][rec.token] = rec.vector.astype(np.float64, copy=True)
            counts[shard][rec.token] = 1
        else:
            acc += rec.vector
            counts[shard][rec.token] += 1
    if not order or dim is None:
        raise ToolkitError(f"no records found for layer {layer}")
    matrix = np.zeros((len(order), dim), dtype=np.float64)
    totals = np.zeros(len(order), dtype=np.float64)
    position = {token: i for i, token in enumerate(order)}
    for shard in range(shards):
        for token, vec in sums[shard].items():
            matrix[position[token]] += vec
            totals[position[token]] += counts[shard][token]
    matrix /= totals[:, None]
    return StaticEmbeddings(order, matrix)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero vectors are rejected."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for zero vectors")
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))
