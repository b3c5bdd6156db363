"""Shared fixtures: deterministic corpora, hash-derived vectors, mock providers."""

from __future__ import annotations

from hashlib import blake2b
from pathlib import Path

import numpy as np
import pytest

from embeval.analogy import CallableProvider
from embeval.embstore import LAYERS, TokenEmbeddingRecord

DATA_DIR = Path(__file__).parent / "data"
MINI_ANALOGY = DATA_DIR / "mini_analogy.txt"


def hash_vector(token: str, dim: int = 16, salt: str = "") -> np.ndarray:
    """Deterministic context-free vector derived from the token's hash."""
    raw = blake2b(f"{salt}|{token}".encode("utf-8"), digest_size=4 * dim).digest()
    ints = np.frombuffer(raw, dtype="<u4")
    return ints.astype(np.float64) / 2.0**31 - 1.0


def hash_records(sentences: list[str], dim: int = 16) -> list[TokenEmbeddingRecord]:
    """Context-free records for every token of every sentence, all layers."""
    records = []
    for si, sentence in enumerate(sentences, start=1):
        for pos, token in enumerate(sentence.split()):
            for layer in LAYERS:
                records.append(
                    TokenEmbeddingRecord(
                        sentence_id=str(si),
                        position=pos,
                        token=token,
                        layer=layer,
                        vector=hash_vector(token, dim, salt=layer),
                    )
                )
    return records


@pytest.fixture
def mock_provider():
    """Context-free provider: each token's vector depends only on the token."""
    return CallableProvider(lambda sentences: hash_records(list(sentences)))


def fixture_corpus_lines(
    token_target: int = 1_000_000, seed: int = 7, vocab_size: int = 5000
) -> list[str]:
    """Deterministic synthetic corpus in canonical format, ~token_target tokens.

    Zipf-like unigram sampling over an invented vocabulary; sentences of
    8..24 tokens grouped into paragraphs of 2..5 sentences separated by
    blank lines. Random 9-grams over this vocabulary never collide, so the
    corpus is free of near-duplicate units.
    """
    rs = np.random.RandomState(seed)
    words = np.array([f"w{i:04d}" for i in range(vocab_size)])
    weights = 1.0 / np.arange(1, vocab_size + 1)
    weights /= weights.sum()
    ids = rs.choice(vocab_size, size=token_target, p=weights)
    lines: list[str] = []
    pos = 0
    while pos < token_target:
        for _ in range(int(rs.randint(2, 6))):  # sentences in this paragraph
            length = int(rs.randint(8, 25))
            chunk = ids[pos : pos + length]
            if chunk.size == 0:
                break
            lines.append(" ".join(words[chunk]))
            pos += length
        lines.append("")
    while lines and not lines[-1]:
        lines.pop()
    return lines


@pytest.fixture(scope="session")
def million_token_corpus(tmp_path_factory) -> Path:
    lines = fixture_corpus_lines()
    path = tmp_path_factory.mktemp("fixture") / "corpus.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
