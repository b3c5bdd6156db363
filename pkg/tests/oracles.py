"""Independent brute-force oracles used to pin down expected values.

Everything here is deliberately written with plain Python arithmetic and
exhaustive loops, not with the library under test.
"""

from __future__ import annotations

import math


def brute_cosine(u, v) -> float:
    dot = 0.0
    nu = 0.0
    nv = 0.0
    for x, y in zip(u, v):
        dot += float(x) * float(y)
        nu += float(x) * float(x)
        nv += float(y) * float(y)
    return dot / (math.sqrt(nu) * math.sqrt(nv))


def brute_cosine_order(query, candidates) -> list[int]:
    """Indices sorted by cosine to the query, descending, ties by index."""
    scores = [brute_cosine(query, cand) for cand in candidates]
    return sorted(range(len(candidates)), key=lambda i: (-scores[i], i))


def brute_csls_order(query, candidates, k: int) -> list[int]:
    """Rank by 2 cos(q, y) - r(q) - r(y) with a single-query r(y) term."""
    cos = [brute_cosine(query, cand) for cand in candidates]
    r_query = sum(sorted(cos, reverse=True)[:k]) / k
    scores = [2.0 * c - r_query - c for c in cos]
    return sorted(range(len(candidates)), key=lambda i: (-scores[i], i))


def brute_analogy_rank(vectors: dict, a: str, b: str, c: str, d: str, candidates) -> int:
    """1-based rank of d among candidates (a, b, c excluded) for b - a + c."""
    query = [
        float(x) - float(y) + float(z)
        for x, y, z in zip(vectors[b], vectors[a], vectors[c])
    ]
    scored = []
    for idx, word in enumerate(candidates):
        if word in (a, b, c):
            continue
        scored.append((-brute_cosine(query, vectors[word]), idx, word))
    scored.sort()
    for rank, (_, _, word) in enumerate(scored, start=1):
        if word == d:
            return rank
    raise AssertionError(f"{d!r} not among candidates")


def brute_macro_f1(gold: list[str], pred: list[str]) -> float:
    """Macro-F1 over PER/LOC/ORG from an explicit 4x4 confusion matrix."""
    labels = ("PER", "LOC", "ORG", "O")
    matrix = {(g, p): 0 for g in labels for p in labels}
    for g, p in zip(gold, pred):
        matrix[(g, p)] += 1
    f1s = []
    for c in ("PER", "LOC", "ORG"):
        tp = matrix[(c, c)]
        fp = sum(matrix[(g, c)] for g in labels if g != c)
        fn = sum(matrix[(c, p)] for p in labels if p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    return sum(f1s) / 3
