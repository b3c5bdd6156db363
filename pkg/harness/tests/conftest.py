"""Builders for the synthetic memorizable NER dataset and provider requests."""

from __future__ import annotations

import sys
from hashlib import blake2b
from pathlib import Path

import numpy as np
import pytest

from nnh.formats import LABELS, LAYERS, Record, write_labeled, write_records

PRIMARY_CLI = [sys.executable, "-m", "embeval.cli"]


def _noise(token: str, layer: str, dim: int) -> np.ndarray:
    raw = blake2b(f"{layer}|{token}".encode("utf-8"), digest_size=4 * dim).digest()
    ints = np.frombuffer(raw, dtype="<u4")
    return (ints.astype(np.float64) / 2.0**31 - 1.0) * 0.1


def synthetic_sentences(n_sentences: int, seed: int):
    """Sentences whose token names determine their labels."""
    rs = np.random.RandomState(seed)
    sentences = []
    for _ in range(n_sentences):
        length = int(rs.randint(6, 13))
        tokens, labels = [], []
        for _ in range(length):
            label = LABELS[int(rs.randint(0, len(LABELS)))]
            tokens.append(f"{label.lower()}{int(rs.randint(0, 30)):02d}")
            labels.append(label)
        sentences.append((tokens, labels))
    return sentences


def records_for(sentences, dim: int = 12):
    """Label-encoding embeddings: a label direction plus token-hash jitter,
    so a linear map is enough to classify every token."""
    records = []
    for si, (tokens, labels) in enumerate(sentences, start=1):
        for pos, (token, label) in enumerate(zip(tokens, labels)):
            base = np.zeros(dim)
            base[LABELS.index(label)] = 3.0
            for layer in LAYERS:
                records.append(Record(str(si), pos, token, layer, base + _noise(token, layer, dim)))
    return records


@pytest.fixture
def synthetic_split(tmp_path: Path) -> dict:
    train = synthetic_sentences(64, seed=1)
    test = synthetic_sentences(12, seed=2)
    paths = {
        "train_labels": tmp_path / "train.tsv",
        "train_records": tmp_path / "train-records.tsv",
        "test_labels": tmp_path / "test.tsv",
        "test_records": tmp_path / "test-records.tsv",
        "dir": tmp_path,
    }
    write_labeled(train, paths["train_labels"])
    write_records(records_for(train), paths["train_records"])
    write_labeled(test, paths["test_labels"])
    write_records(records_for(test), paths["test_records"])
    return paths
