"""Prediction: argmax labels for record files, emitted in two-column format."""

from __future__ import annotations

from pathlib import Path

import torch

from .data import assemble_features
from .formats import LABELS, write_labeled
from .model import Tagger
from .train import _pad_batch, load_tagger


def predict_records(
    artifact_path: str | Path,
    records: list[str | Path],
    out_path: str | Path,
    batch_size: int = 32,
) -> int:
    """Write one predicted label per token; returns the sentence count."""
    model, config, dim = load_tagger(artifact_path)
    features, tokens = assemble_features(records, config.layers)
    if features[0].shape[2] != dim:
        raise ValueError(f"records have dimension {features[0].shape[2]}, model expects {dim}")
    sentences = []
    with torch.no_grad():
        for start in range(0, len(features), batch_size):
            indices = list(range(start, min(start + batch_size, len(features))))
            x, _, lengths = _pad_batch(features, None, indices)
            logits = model(x, lengths)
            ids = torch.argmax(logits, dim=-1)
            for row, i in enumerate(indices):
                length = features[i].shape[0]
                labels = [LABELS[int(l)] for l in ids[row, :length]]
                sentences.append((tokens[i], labels))
    write_labeled(sentences, out_path)
    return len(sentences)
