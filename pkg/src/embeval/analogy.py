"""Word-analogy evaluation: nearest-neighbor and sentence-template methods.

Method A answers ``a : b :: c : ?`` over static vectors: rank the candidate
vocabulary by cosine similarity to ``vec(b) - vec(a) + vec(c)`` and check
whether the expected word lands in the top n. Method B embeds each
question inside a fixed carrier sentence, substitutes every candidate word
into the final slot, re-embeds, and ranks the candidates' slot vectors
(CSLS or plain cosine) against the query built from the first three words'
contextual vectors.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .corpus import Sentence, load_rules, tokenize
from .embstore import StaticEmbeddings, TokenEmbeddingRecord, ingest_records
from .errors import ParseError, ProtocolError, ToolkitError

SEMANTIC = "semantic"
SYNTACTIC = "syntactic"
KINDS = (SEMANTIC, SYNTACTIC)

# Categories are split by order of appearance: this many lead categories
# count as semantic, the rest as syntactic.
DEFAULT_SEMANTIC_CATEGORIES = 5


@dataclass(frozen=True)
class AnalogyQuestion:
    a: str
    b: str
    c: str
    d: str
    category: str
    kind: str

    def __post_init__(self):
        words = (self.a, self.b, self.c, self.d)
        if any(not w for w in words):
            raise ValueError("analogy words must be non-empty")
        if len(set(words)) != 4:
            raise ValueError(f"analogy words must be distinct, got {words}")
        if not self.category:
            raise ValueError("category must be non-empty")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


@dataclass
class CategoryResult:
    category: str
    kind: str
    asked: int = 0
    skipped_oov: int = 0
    hits: dict[int, int] = field(default_factory=dict)

    def accuracy(self, n: int) -> float:
        answered = self.asked - self.skipped_oov
        if answered <= 0:
            return 0.0
        return self.hits.get(n, 0) / answered


@dataclass(frozen=True)
class CslsConfig:
    k: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"CSLS neighborhood size must be >= 1, got {self.k}")


class TemplateSpec:
    """A carrier-sentence pattern with slots {A} {B} {C} {D}, {D} last."""

    SLOTS = ("A", "B", "C", "D")

    def __init__(self, lang: str, pattern: str):
        self.lang = lang
        self.pattern = pattern
        positions = []
        for slot in self.SLOTS:
            marker = "{" + slot + "}"
            if pattern.count(marker) != 1:
                raise ValueError(f"template must contain {marker} exactly once")
            positions.append(pattern.index(marker))
        if sorted(positions)[-1] != positions[-1]:
            raise ValueError("the {D} slot must come last in the template")


def load_template(lang: str) -> TemplateSpec:
    """Load the carrier-sentence pattern shipped for ``lang``."""
    ref = resources.files("embeval").joinpath(f"data/templates/{lang}.txt")
    if not ref.is_file():
        raise ToolkitError(f"no template available for language {lang!r}")
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            return TemplateSpec(lang, line)
    raise ToolkitError(f"template file for {lang!r} contains no pattern")


def read_template_file(path: str | Path, lang: str = "custom") -> TemplateSpec:
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            return TemplateSpec(lang, line)
    raise ToolkitError(f"template file {path} contains no pattern")


def parse_analogy_dataset(
    path: str | Path,
    kind_map: Mapping[str, str] | None = None,
    semantic_categories: int = DEFAULT_SEMANTIC_CATEGORIES,
) -> list[AnalogyQuestion]:
    """Parse a Mikolov-style analogy file.

    Lines of the form ``: name`` open a category; every other non-blank
    line holds the four question words. Without an explicit ``kind_map``,
    the first ``semantic_categories`` categories (by order of appearance)
    are semantic and the rest syntactic.
    """
    path = Path(path)
    questions: list[AnalogyQuestion] = []
    category: str | None = None
    category_order: list[str] = []
    pending: list[tuple[int, str, list[str]]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(":"):
                category = line[1:].strip()
                if not category:
                    raise ParseError(path, line_no, "empty category name")
                if category not in category_order:
                    category_order.append(category)
                continue
            words = line.split()
            if category is None:
                raise ParseError(path, line_no, "question appears before any category header")
            if len(words) != 4:
                raise ParseError(path, line_no, f"expected 4 words, got {len(words)}")
            pending.append((line_no, category, words))
    kinds: dict[str, str] = {}
    for i, name in enumerate(category_order):
        if kind_map is not None and name in kind_map:
            kind = kind_map[name]
            if kind not in KINDS:
                raise ValueError(f"kind_map[{name!r}] must be one of {KINDS}")
        else:
            kind = SEMANTIC if i < semantic_categories else SYNTACTIC
        kinds[name] = kind
    for line_no, name, words in pending:
        try:
            questions.append(AnalogyQuestion(*words, category=name, kind=kinds[name]))
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc)) from None
    return questions


def cosine_scores(query: np.ndarray, matrix: np.ndarray, row_norms: np.ndarray) -> np.ndarray:
    """Cosine of ``query`` against every matrix row. Shared by both methods
    so that identical inputs produce bitwise-identical rankings."""
    qnorm = float(np.linalg.norm(query))
    if qnorm == 0.0:
        raise ToolkitError("query vector is zero; cosine ranking undefined")
    return (matrix @ query) / (row_norms * qnorm)


def rank_descending(scores: np.ndarray) -> np.ndarray:
    """Indices sorted by score descending, ties broken by lower index."""
    return np.lexsort((np.arange(scores.shape[0]), -scores))


def csls_rank(
    query: np.ndarray, candidates: np.ndarray, cfg: CslsConfig
) -> np.ndarray:
    """Rank candidate rows for ``query`` by the CSLS criterion.

    score(y) = 2 cos(q, y) - r(q) - r(y), with r(q) the mean cosine of the
    query to its k nearest candidates and r(y) the mean cosine of y to its
    nearest queries. With a single query the r(y) term reduces to
    cos(y, q), so the correction shifts scores without reordering; it is
    kept literal so the score values match the definition. Ties break by
    candidate index.
    """
    candidates = np.asarray(candidates, dtype=np.float64)
    if candidates.ndim != 2 or candidates.shape[0] < 2:
        raise ValueError("need at least two candidate vectors")
    if not 1 <= cfg.k <= candidates.shape[0] - 1:
        raise ValueError(
            f"CSLS k={cfg.k} out of range for {candidates.shape[0]} candidates"
        )
    row_norms = np.linalg.norm(candidates, axis=1)
    if np.any(row_norms == 0.0):
        raise ToolkitError("candidate matrix contains a zero vector")
    cos = cosine_scores(np.asarray(query, dtype=np.float64), candidates, row_norms)
    r_query = float(np.sort(cos)[-cfg.k :].mean())
    r_candidates = cos  # nearest queries of y: the single query itself
    scores = 2.0 * cos - r_query - r_candidates
    return rank_descending(scores)


def _hit_counts(
    order: Sequence[int] | np.ndarray, target_index: int, ns: Sequence[int]
) -> dict[int, bool]:
    rank = int(np.nonzero(np.asarray(order) == target_index)[0][0]) + 1
    return {n: rank <= n for n in ns}


def _category_results(
    questions: Iterable[AnalogyQuestion],
    outcome: Mapping[int, tuple[bool, dict[int, bool]]],
    ns: Sequence[int],
) -> list[CategoryResult]:
    """Fold per-question outcomes into per-category tallies (dataset order)."""
    results: dict[str, CategoryResult] = {}
    order: list[str] = []
    for i, q in enumerate(questions):
        if q.category not in results:
            results[q.category] = CategoryResult(q.category, q.kind, hits={n: 0 for n in ns})
            order.append(q.category)
        res = results[q.category]
        res.asked += 1
        skipped, hits = outcome[i]
        if skipped:
            res.skipped_oov += 1
            continue
        for n in ns:
            if hits.get(n, False):
                res.hits[n] += 1
    return [results[name] for name in order]


def method_a_evaluate(
    emb: StaticEmbeddings,
    questions: Sequence[AnalogyQuestion],
    candidate_limit: int | None = None,
    ns: Sequence[int] = (1, 5),
) -> list[CategoryResult]:
    """Nearest-neighbor analogy accuracy over averaged static vectors.

    Candidates are the first ``candidate_limit`` vocabulary entries in rank
    order. The three query words are excluded from the candidate pool, and
    questions with any word outside the pool count as skipped, not missed.
    """
    if candidate_limit is None:
        candidate_limit = len(emb)
    if candidate_limit < 1 or candidate_limit > len(emb):
        raise ValueError(f"candidate_limit must be in 1..{len(emb)}")
    matrix = emb.matrix[:candidate_limit]
    row_norms = np.linalg.norm(matrix, axis=1)
    if np.any(row_norms == 0.0):
        raise ToolkitError("candidate matrix contains a zero vector")
    index = {tok: i for i, tok in enumerate(emb.vocab[:candidate_limit])}
    outcome: dict[int, tuple[bool, dict[int, bool]]] = {}
    for qi, q in enumerate(questions):
        ids = [index.get(w) for w in (q.a, q.b, q.c, q.d)]
        if any(i is None for i in ids):
            outcome[qi] = (True, {})
            continue
        ia, ib, ic, id_ = ids
        query = matrix[ib] - matrix[ia] + matrix[ic]
        if float(np.linalg.norm(query)) == 0.0:
            # Degenerate b - a + c = 0: no ranking possible, count as a miss.
            outcome[qi] = (False, {n: False for n in ns})
            continue
        scores = cosine_scores(query, matrix, row_norms)
        scores[[ia, ib, ic]] = -np.inf
        s_d = scores[id_]
        better = int(np.sum(scores > s_d)) + int(np.sum((scores == s_d) & (np.arange(len(scores)) < id_)))
        rank = better + 1
        outcome[qi] = (False, {n: rank <= n for n in ns})
    return _category_results(questions, outcome, ns)


class TemplateSentence:
    """A filled carrier sentence plus the token positions of its slots."""

    def __init__(self, tokens: list[str], slots: dict[str, int]):
        self.tokens = tokens
        self.slots = slots

    @property
    def d_position(self) -> int:
        return self.slots["D"]

    def text(self) -> str:
        return " ".join(self.tokens)

    def substituted(self, word: str) -> list[str]:
        out = list(self.tokens)
        out[self.d_position] = word
        return out


def build_template_sentence(q: AnalogyQuestion, spec: TemplateSpec) -> TemplateSentence:
    """Fill the template with the question words, tracking slot positions."""
    rules = load_rules(spec.lang)
    fillers = {"A": q.a, "B": q.b, "C": q.c, "D": q.d}
    tokens: list[str] = []
    slots: dict[str, int] = {}
    pattern = spec.pattern
    pos = 0
    for slot in TemplateSpec.SLOTS:
        marker = "{" + slot + "}"
        cut = pattern.index(marker, pos)
        literal = pattern[pos:cut]
        if literal.strip():
            tokens.extend(tokenize(literal, rules).tokens)
        word = fillers[slot]
        if any(ch.isspace() for ch in word):
            raise ToolkitError(f"multiword entries are unsupported: {word!r}")
        slots[slot] = len(tokens)
        tokens.append(word)
        pos = cut + len(marker)
    tail = pattern[pos:]
    if tail.strip():
        tokens.extend(tokenize(tail, rules).tokens)
    Sentence(tokens)  # enforce sentence invariants
    return TemplateSentence(tokens, slots)


class CallableProvider:
    """In-process provider: wraps a function from sentences to records."""

    def __init__(self, fn: Callable[[Sequence[str]], Iterable[TokenEmbeddingRecord]]):
        self._fn = fn

    def embed(self, sentences: Sequence[str]) -> Iterable[TokenEmbeddingRecord]:
        return self._fn(sentences)


class SubprocessProvider:
    """Provider invoked as a subprocess over request/response files.

    The command is run as ``argv --embed-in <sentences> --embed-out
    <records>``; the request file holds one canonical-format sentence per
    line, and records must use the 1-based request line number as their
    sentence id.
    """

    def __init__(self, argv: Sequence[str]):
        if not argv:
            raise ValueError("empty provider command")
        self.argv = list(argv)

    def embed(self, sentences: Sequence[str]) -> Iterator[TokenEmbeddingRecord]:
        with tempfile.TemporaryDirectory(prefix="embeval-provider-") as tmp:
            req = Path(tmp) / "sentences.txt"
            resp = Path(tmp) / "records.tsv"
            req.write_text("".join(s + "\n" for s in sentences), encoding="utf-8")
            argv = self.argv + ["--embed-in", str(req), "--embed-out", str(resp)]
            proc = subprocess.run(argv, capture_output=True, text=True)
            if proc.returncode != 0:
                raise ProtocolError(
                    f"provider {self.argv[0]!r} exited with {proc.returncode}: {proc.stderr.strip()}"
                )
            yield from ingest_records(resp)


class PrecomputedProvider:
    """Provider backed by a record file produced offline for a known request."""

    def __init__(self, record_path: str | Path):
        self.record_path = Path(record_path)

    def embed(self, sentences: Sequence[str]) -> Iterator[TokenEmbeddingRecord]:
        return ingest_records(self.record_path)


def collect_slot_vectors(
    provider,
    sentences: Sequence[list[str]],
    needed: Mapping[int, Sequence[int]],
    layer: str,
) -> dict[tuple[int, int], np.ndarray]:
    """Embed sentences and keep only the (sentence, position) vectors asked for.

    Sentences are joined to canonical text lines for the provider; its
    records are validated against the request (ids in range, consistent
    dimension, expected token at each kept position).
    """
    texts = [" ".join(toks) for toks in sentences]
    wanted = {(si, pos) for si, positions in needed.items() for pos in positions}
    vectors: dict[tuple[int, int], np.ndarray] = {}
    dim: int | None = None
    for rec in provider.embed(texts):
        if rec.layer != layer:
            continue
        try:
            si = int(rec.sentence_id) - 1
        except ValueError:
            raise ProtocolError(f"non-numeric sentence id {rec.sentence_id!r}") from None
        if not 0 <= si < len(sentences):
            raise ProtocolError(f"sentence id {rec.sentence_id} outside request range")
        if rec.position >= len(sentences[si]):
            raise ProtocolError(
                f"position {rec.position} beyond sentence of {len(sentences[si])} tokens"
            )
        if (si, rec.position) not in wanted:
            continue
        if dim is None:
            dim = rec.vector.shape[0]
        elif rec.vector.shape[0] != dim:
            raise ProtocolError(
                f"provider changed dimension from {dim} to {rec.vector.shape[0]}"
            )
        expected = sentences[si][rec.position]
        if rec.token != expected:
            raise ProtocolError(
                f"provider returned token {rec.token!r} at {si + 1}:{rec.position}, expected {expected!r}"
            )
        vectors[(si, rec.position)] = rec.vector
    missing = wanted - set(vectors)
    if missing:
        si, pos = sorted(missing)[0]
        raise ProtocolError(
            f"provider response missing layer {layer} vector for sentence {si + 1} position {pos}"
            + (f" ({len(missing)} total)" if len(missing) > 1 else "")
        )
    return vectors


def build_requests(
    questions: Sequence[AnalogyQuestion],
    spec: TemplateSpec,
    vocab: Sequence[str],
) -> tuple[list[list[str]], list[dict]]:
    """All sentences method B will embed, in deterministic order.

    Returns the token-list sentences and one plan per question holding the
    base-sentence index, the filled template, the candidate words in vocab
    order (query words excluded) and their sentence indices.
    """
    sentences: list[list[str]] = []
    plans: list[dict] = []
    for q in questions:
        filled = build_template_sentence(q, spec)
        base_index = len(sentences)
        sentences.append(filled.tokens)
        exclude = {q.a, q.b, q.c}
        candidates = [w for w in vocab if w not in exclude]
        candidate_indices = []
        for word in candidates:
            candidate_indices.append(len(sentences))
            sentences.append(filled.substituted(word))
        plans.append(
            {
                "template": filled,
                "base": base_index,
                "candidates": candidates,
                "candidate_indices": candidate_indices,
            }
        )
    return sentences, plans


def write_request_file(sentences: Sequence[list[str]], path: str | Path) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for toks in sentences:
            fh.write(" ".join(toks))
            fh.write("\n")
    return len(sentences)


def method_b_evaluate(
    provider,
    questions: Sequence[AnalogyQuestion],
    spec: TemplateSpec,
    vocab: Sequence[str],
    cfg: CslsConfig = CslsConfig(),
    ns: Sequence[int] = (1, 5),
    layer: str = "LSTM1",
    ranking: str = "csls",
) -> list[CategoryResult]:
    """Sentence-template analogy accuracy from contextual vectors.

    The query is ``v(b) - v(a) + v(c)`` taken from the base sentence at the
    chosen layer; every vocabulary candidate is substituted into the final
    slot and represented by its re-embedded slot vector. A question whose
    answer is not in the candidate pool is skipped, not missed.
    """
    if ranking not in ("csls", "cosine"):
        raise ValueError(f"ranking must be 'csls' or 'cosine', got {ranking!r}")
    sentences, plans = build_requests(questions, spec, vocab)
    needed: dict[int, list[int]] = {}
    for plan in plans:
        filled: TemplateSentence = plan["template"]
        needed[plan["base"]] = [filled.slots["A"], filled.slots["B"], filled.slots["C"]]
        for si in plan["candidate_indices"]:
            needed[si] = [filled.d_position]
    vectors = collect_slot_vectors(provider, sentences, needed, layer)
    outcome: dict[int, tuple[bool, dict[int, bool]]] = {}
    for qi, (q, plan) in enumerate(zip(questions, plans)):
        filled = plan["template"]
        candidates: list[str] = plan["candidates"]
        if q.d not in candidates:
            outcome[qi] = (True, {})
            continue
        base = plan["base"]
        v_a = vectors[(base, filled.slots["A"])]
        v_b = vectors[(base, filled.slots["B"])]
        v_c = vectors[(base, filled.slots["C"])]
        query = v_b - v_a + v_c
        matrix = np.vstack([vectors[(si, filled.d_position)] for si in plan["candidate_indices"]])
        target = candidates.index(q.d)
        if ranking == "csls":
            order = csls_rank(query, matrix, cfg)
        else:
            row_norms = np.linalg.norm(matrix, axis=1)
            if np.any(row_norms == 0.0):
                raise ToolkitError("candidate matrix contains a zero vector")
            order = rank_descending(cosine_scores(query, matrix, row_norms))
        outcome[qi] = (False, _hit_counts(order, target, ns))
    return _category_results(questions, outcome, ns)


def aggregate(results: Sequence[CategoryResult], n: int) -> tuple[float, float]:
    """Unweighted mean of per-category accuracy@n, split by kind."""
    sem = [r.accuracy(n) for r in results if r.kind == SEMANTIC]
    syn = [r.accuracy(n) for r in results if r.kind == SYNTACTIC]
    if not sem or not syn:
        missing = SEMANTIC if not sem else SYNTACTIC
        raise ValueError(f"no {missing} categories to aggregate")
    return sum(sem) / len(sem), sum(syn) / len(syn)
