"""Assembling record files and labeled sentences into training arrays."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .formats import LABELS, read_labeled, read_records

LABEL_TO_ID = {label: i for i, label in enumerate(LABELS)}


class AlignmentError(ValueError):
    """Records and labels do not describe the same token sequence."""


def assemble_features(
    record_paths: list[str | Path], layers: tuple[str, ...]
) -> tuple[list[np.ndarray], list[list[str]]]:
    """Group records into per-sentence feature arrays.

    Returns one (T, n_layers, d) array per sentence, ordered by numeric
    sentence id, plus the token sequences. Every requested layer must be
    present for every position.
    """
    per_sentence: dict[int, dict[int, dict[str, np.ndarray]]] = {}
    tokens: dict[int, dict[int, str]] = {}
    dim: int | None = None
    for path in record_paths:
        for rec in read_records(path):
            if rec.layer not in layers:
                continue
            try:
                si = int(rec.sentence_id)
            except ValueError:
                raise AlignmentError(f"non-numeric sentence id {rec.sentence_id!r}") from None
            if dim is None:
                dim = rec.vector.shape[0]
            elif rec.vector.shape[0] != dim:
                raise AlignmentError(
                    f"vector dimension changed from {dim} to {rec.vector.shape[0]}"
                )
            per_sentence.setdefault(si, {}).setdefault(rec.position, {})[rec.layer] = rec.vector
            previous = tokens.setdefault(si, {}).setdefault(rec.position, rec.token)
            if previous != rec.token:
                raise AlignmentError(
                    f"sentence {si} position {rec.position}: token {rec.token!r} != {previous!r}"
                )
    if not per_sentence:
        raise AlignmentError(f"no records for layers {layers} in {record_paths}")
    features: list[np.ndarray] = []
    sentence_tokens: list[list[str]] = []
    for si in sorted(per_sentence):
        positions = per_sentence[si]
        length = max(positions) + 1
        if sorted(positions) != list(range(length)):
            raise AlignmentError(f"sentence {si}: positions are not contiguous from 0")
        array = np.zeros((length, len(layers), dim), dtype=np.float32)
        for pos in range(length):
            by_layer = positions[pos]
            for li, layer in enumerate(layers):
                if layer not in by_layer:
                    raise AlignmentError(
                        f"sentence {si} position {pos}: missing layer {layer}"
                    )
                array[pos, li] = by_layer[layer]
        features.append(array)
        sentence_tokens.append([tokens[si][p] for p in range(length)])
    return features, sentence_tokens


def align_labels(
    sentence_tokens: list[list[str]], labeled_path: str | Path
) -> list[np.ndarray]:
    """Match record-derived sentences against a labeled file, token for token."""
    labeled = read_labeled(labeled_path)
    if len(labeled) != len(sentence_tokens):
        raise AlignmentError(
            f"{len(sentence_tokens)} sentences in records, {len(labeled)} in {labeled_path}"
        )
    label_ids: list[np.ndarray] = []
    for si, (tokens, (gold_tokens, gold_labels)) in enumerate(zip(sentence_tokens, labeled)):
        if tokens != gold_tokens:
            raise AlignmentError(f"sentence {si}: record tokens do not match labeled tokens")
        unknown = [l for l in gold_labels if l not in LABEL_TO_ID]
        if unknown:
            raise AlignmentError(
                f"sentence {si}: labels outside {LABELS}: {sorted(set(unknown))}"
            )
        label_ids.append(np.array([LABEL_TO_ID[l] for l in gold_labels], dtype=np.int64))
    return label_ids
