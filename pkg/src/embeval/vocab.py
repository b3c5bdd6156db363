"""Token frequency counting and frequency-thresholded vocabulary files."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping


@dataclass(frozen=True)
class VocabEntry:
    token: str
    count: int
    rank: int  # 1-based, by descending count with lexicographic tie-break


def count_tokens(lines: Iterable[str]) -> Counter:
    """Exact token counts over canonical one-sentence-per-line input."""
    counts: Counter = Counter()
    for line in lines:
        counts.update(line.split())
    return counts


def merge_counts(parts: Iterable[Mapping[str, int]]) -> Counter:
    """Merge shard counters; commutative, so shard boundaries do not matter."""
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


def default_min_count(total_tokens: int) -> int:
    """Corpus-size dependent frequency threshold.

    15 below 100M tokens, 25 at 1B tokens and above, with linear integer
    steps in between.
    """
    low, high = 100_000_000, 1_000_000_000
    if total_tokens < low:
        return 15
    if total_tokens >= high:
        return 25
    return 15 + round(10 * (total_tokens - low) / (high - low))


def build_vocab(
    counts: Mapping[str, int], min_count: int = 1, max_size: int | None = None
) -> list[VocabEntry]:
    """Thresholded vocabulary in rank order.

    Keeps tokens with count >= ``min_count``, sorted by descending count
    with ties broken lexicographically by code point, truncated to
    ``max_size`` entries when given.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    kept = [(token, c) for token, c in counts.items() if c >= min_count]
    kept.sort(key=lambda item: (-item[1], item[0]))
    if max_size is not None:
        kept = kept[:max_size]
    return [VocabEntry(token, c, rank) for rank, (token, c) in enumerate(kept, start=1)]


def write_vocab(entries: list[VocabEntry], path: str | Path, with_counts: bool = False) -> None:
    """One token per line in rank order; optional tab-separated counts."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in entries:
            if with_counts:
                fh.write(f"{entry.token}\t{entry.count}\n")
            else:
                fh.write(entry.token + "\n")


def read_vocab(path: str | Path) -> list[str]:
    """Tokens in rank order; tolerates an optional counts column."""
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            tokens.append(line.split("\t", 1)[0])
    return tokens
