"""Near-duplicate removal over paragraphs or sentences via n-gram shingles.

A unit (paragraph or sentence) is dropped when strictly more than
``threshold`` of its distinct shingles have been seen in previously kept
units; kept units add their shingles to the seen set. One greedy pass in
corpus order, so a fixed stream always yields the same kept set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from hashlib import blake2b
from pathlib import Path
from typing import Iterable, Iterator

PARAGRAPH = "paragraph"
SENTENCE = "sentence"
UNITS = (PARAGRAPH, SENTENCE)


@dataclass(frozen=True)
class DedupConfig:
    n: int = 9
    threshold: float = 0.9
    unit: str = PARAGRAPH

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"shingle length must be >= 1, got {self.n}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.unit not in UNITS:
            raise ValueError(f"unit must be one of {UNITS}, got {self.unit!r}")


class ShingleSet:
    """Set of 64-bit shingle hashes, sharded by high hash bits.

    Sharding keeps individual sets smaller and gives a natural partition
    for concurrent probing; membership semantics are those of one big set.
    """

    SHARD_BITS = 4

    def __init__(self):
        self._shards = [set() for _ in range(1 << self.SHARD_BITS)]
        self._shift = 64 - self.SHARD_BITS

    def __contains__(self, h: int) -> bool:
        return h in self._shards[h >> self._shift]

    def add(self, h: int) -> None:
        self._shards[h >> self._shift].add(h)

    def update(self, hashes: Iterable[int]) -> None:
        for h in hashes:
            self._shards[h >> self._shift].add(h)

    def __len__(self) -> int:
        return sum(len(s) for s in self._shards)


def shingle(tokens: list[str], n: int) -> list[int]:
    """Hashes of all contiguous n-token windows of ``tokens``.

    Units shorter than ``n`` yield a single hash of the whole unit, so
    short boilerplate lines still deduplicate. The hash is the first 8
    bytes of BLAKE2b over the space-joined window (big-endian), which is
    stable across runs and platforms.
    """
    if not tokens:
        raise ValueError("cannot shingle an empty unit")
    if n < 1:
        raise ValueError(f"shingle length must be >= 1, got {n}")
    encoded = [t.encode("utf-8") for t in tokens]
    if len(encoded) < n:
        windows = [b" ".join(encoded)]
    else:
        windows = [b" ".join(encoded[i : i + n]) for i in range(len(encoded) - n + 1)]
    return [
        int.from_bytes(blake2b(w, digest_size=8).digest(), "big") for w in windows
    ]


@dataclass
class DedupStats:
    units_in: int = 0
    units_kept: int = 0
    tokens_in: int = 0
    tokens_kept: int = 0
    distinct_shingles: int = 0

    def as_dict(self) -> dict:
        return {
            "units_in": self.units_in,
            "units_kept": self.units_kept,
            "tokens_in": self.tokens_in,
            "tokens_kept": self.tokens_kept,
            "distinct_shingles": self.distinct_shingles,
        }


@dataclass
class Unit:
    """One dedup unit: the lines it spans and its flat token sequence."""

    lines: list[str]
    tokens: list[str]
    paragraph: int  # index of the source paragraph, for blank-line layout

    @classmethod
    def from_lines(cls, lines: list[str], paragraph: int) -> "Unit":
        tokens = [t for line in lines for t in line.split()]
        return cls(lines=lines, tokens=tokens, paragraph=paragraph)


def iter_units(lines: Iterable[str], unit: str) -> Iterator[Unit]:
    """Group canonical-format lines into dedup units.

    Paragraph mode groups blank-line separated blocks; sentence mode
    yields each non-blank line while remembering its paragraph.
    """
    block: list[str] = []
    paragraph = 0
    for raw in lines:
        line = raw.rstrip("\n")
        if line.strip():
            if unit == SENTENCE:
                yield Unit.from_lines([line], paragraph)
            else:
                block.append(line)
        else:
            if block:
                yield Unit.from_lines(block, paragraph)
                block = []
            paragraph += 1
    if block:
        yield Unit.from_lines(block, paragraph)


def dedup_stream(
    units: Iterable[Unit],
    cfg: DedupConfig,
    stats: DedupStats | None = None,
    seen: ShingleSet | None = None,
) -> Iterator[Unit]:
    """Yield the units kept by the single-pass greedy algorithm.

    For each unit, the duplicate ratio is the fraction of its distinct
    shingles already present in the seen set; the unit is dropped iff the
    ratio is strictly greater than the threshold. ``stats`` (if given) is
    filled in while the stream is consumed.
    """
    if seen is None:
        seen = ShingleSet()
    for unit in units:
        hashes = set(shingle(unit.tokens, cfg.n))
        dup = sum(1 for h in hashes if h in seen)
        if stats is not None:
            stats.units_in += 1
            stats.tokens_in += len(unit.tokens)
        if dup / len(hashes) > cfg.threshold:
            continue
        seen.update(hashes)
        if stats is not None:
            stats.units_kept += 1
            stats.tokens_kept += len(unit.tokens)
            stats.distinct_shingles = len(seen)
        yield unit


def dedup_units(units: Iterable[Unit], cfg: DedupConfig) -> tuple[list[Unit], DedupStats]:
    """Eager variant of :func:`dedup_stream`, returning kept units and stats."""
    stats = DedupStats()
    kept = list(dedup_stream(units, cfg, stats))
    return kept, stats


def write_units(units: Iterable[Unit], out_path: str | Path) -> None:
    """Write units back in canonical format, preserving paragraph breaks."""
    last_paragraph = None
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for unit in units:
            if last_paragraph is not None and unit.paragraph != last_paragraph:
                fh.write("\n")
            last_paragraph = unit.paragraph
            for line in unit.lines:
                fh.write(line)
                fh.write("\n")


def dedup_file(
    in_path: str | Path,
    out_path: str | Path,
    cfg: DedupConfig,
    stats_path: str | Path | None = None,
) -> DedupStats:
    """Deduplicate one canonical-format file, streaming, and write stats."""
    stats = DedupStats()
    with open(in_path, encoding="utf-8") as fh:
        kept = dedup_stream(iter_units(fh, cfg.unit), cfg, stats)
        write_units(kept, out_path)
    if stats_path is not None:
        with open(stats_path, "w", encoding="utf-8") as fh:
            json.dump(stats.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return stats
