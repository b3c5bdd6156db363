"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import random
import time

import numpy as np
import pytest

from conftest import MINI_ANALOGY, fixture_corpus_lines, hash_records, hash_vector
from embeval.analogy import (
    AnalogyQuestion,
    CslsConfig,
    csls_rank,
    load_template,
    method_a_evaluate,
    method_b_evaluate,
    parse_analogy_dataset,
)
from embeval.dedup import SENTENCE, DedupConfig, dedup_units, iter_units
from embeval.embstore import StaticEmbeddings, TokenEmbeddingRecord, average_occurrences
from embeval.ner import LabelStats, NerSentence, macro_f1
from embeval.pipeline import PipelineConfig, run_pipeline
from embeval.reports import analogy_layer_table, ner_system_table
from oracles import brute_analogy_rank, brute_csls_order, brute_macro_f1
from test_pipeline import ALL_STAGES, ARTIFACTS, make_workspace


def _criterion(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    assert ok, f"{name}{suffix}"


# (PER, LOC, ORG, N, published density) for the eight benchmark datasets
LABEL_DENSITY_ROWS = [
    ("Croatian", 10241, 7445, 11216, 506457, 0.057),
    ("Estonian", 8490, 6326, 6149, 217272, 0.096),
    ("Finnish", 3402, 2173, 11258, 193742, 0.087),
    ("Latvian", 5615, 2643, 3341, 137040, 0.085),
    ("Lithuanian", 2101, 2757, 2126, 91983, 0.076),
    ("Slovenian", 4478, 2460, 2667, 194667, 0.049),
    ("Swedish", 3976, 1797, 1519, 155332, 0.047),
    ("English", 17050, 12316, 14613, 301418, 0.146),
]


def test_label_density_arithmetic():
    start = time.perf_counter()
    ok = True
    for lang, per, loc, org, n, published in LABEL_DENSITY_ROWS:
        stats = LabelStats(per=per, loc=loc, org=org, n=n)
        if abs(stats.density - published) > 0.0005:
            ok = False
        if stats.as_dict()["density"] != published:
            ok = False
    elapsed = time.perf_counter() - start
    _criterion(
        "label-density-arithmetic",
        ok and elapsed < 1.0,
        f"8 rows within ±0.0005 in {elapsed:.3f}s",
    )


def test_report_layout_fixtures():
    # stored display values only; the layouts are what is under test
    layer_table = analogy_layer_table(
        {
            "sl": {"CNN": (0.14, 0.79), "LSTM1": (0.41, 0.79), "LSTM2": (0.33, 0.57)},
            "hr": {"CNN": (0.13, 0.79), "LSTM1": (0.24, 0.75), "LSTM2": (0.20, 0.54)},
        }
    )
    md = layer_table.to_markdown()
    ok = (
        len(layer_table.rows) == 2
        and len(layer_table.headers) == 7
        and "| sl | 0.14 | 0.79 | 0.41 | 0.79 | 0.33 | 0.57 |" in md
    )
    system_table = ner_system_table(
        {"hr": {"fastText": 0.62, "EFML": 0.73, "EMBEDDIA": 0.82}},
        systems=["fastText", "EFML", "EMBEDDIA"],
    )
    ok = ok and system_table.headers == ["language", "fastText", "EFML", "EMBEDDIA"]
    ok = ok and system_table.rows[0] == ["hr", 0.62, 0.73, 0.82]
    _criterion("report-layout-fixtures", ok, "languages x layers and languages x systems")


class TestDedupOracleSuite:
    def test_dedup_oracle_suite(self, million_token_corpus):
        start = time.perf_counter()
        cfg = DedupConfig(n=9, threshold=0.9, unit="paragraph")
        with open(million_token_corpus, encoding="utf-8") as fh:
            original = list(iter_units(fh, cfg.unit))

        # (a) corpus concatenated with itself: second copy fully dropped
        lines = million_token_corpus.read_text(encoding="utf-8").splitlines()
        doubled = lines + [""] + lines
        kept, stats = dedup_units(iter_units(doubled, cfg.unit), cfg)
        ok_concat = [u.tokens for u in kept] == [u.tokens for u in original]
        ok_tokens = stats.tokens_kept == sum(len(u.tokens) for u in original)

        # (b) dedup is idempotent on randomized mini-corpora
        rng = random.Random(123)
        ok_idem = True
        for case in range(100):
            n = rng.choice([1, 2, 3])
            mini = [
                " ".join(rng.choice("abcdefg") for _ in range(rng.randint(1, 9)))
                for _ in range(rng.randint(1, 30))
            ]
            mini_cfg = DedupConfig(n=n, threshold=rng.choice([0.0, 0.5, 0.9]), unit=SENTENCE)
            once, _ = dedup_units(iter_units(mini, SENTENCE), mini_cfg)
            twice, _ = dedup_units(
                iter_units([" ".join(u.tokens) for u in once], SENTENCE), mini_cfg
            )
            if [u.tokens for u in once] != [u.tokens for u in twice]:
                ok_idem = False
                break

        # (c) duplicate-shingle ratio exactly 0.9 kept, 10/10 dropped
        base = [f"t{i}" for i in range(18)]  # 10 windows under n=9
        near = base[:17] + ["x"]  # shares exactly 9 of its 10 windows
        hand_cfg = DedupConfig(n=9, threshold=0.9, unit=SENTENCE)
        hand_kept, _ = dedup_units(
            iter_units([" ".join(base), " ".join(near), " ".join(base)], SENTENCE), hand_cfg
        )
        ok_hand = [u.tokens for u in hand_kept] == [base, near]

        elapsed = time.perf_counter() - start
        _criterion(
            "dedup-oracle-suite",
            ok_concat and ok_tokens and ok_idem and ok_hand and elapsed < 10.0,
            f"concat+idempotence+threshold in {elapsed:.2f}s",
        )


class TestAnalogyOracles:
    def test_method_a_matches_brute_force(self):
        rs = np.random.RandomState(42)
        words = [f"word{i:02d}" for i in range(50)]
        matrix = rs.randn(50, 8)
        emb = StaticEmbeddings(words, matrix)
        vectors = {w: matrix[i] for i, w in enumerate(words)}
        ok = True
        for _ in range(300):
            a, b, c, d = (words[i] for i in rs.choice(50, size=4, replace=False))
            q = AnalogyQuestion(a, b, c, d, "cat", "semantic")
            (res,) = method_a_evaluate(emb, [q], ns=[1, 5])
            rank = brute_analogy_rank(vectors, a, b, c, d, words)
            if res.hits[1] != (1 if rank <= 1 else 0) or res.hits[5] != (1 if rank <= 5 else 0):
                ok = False
                break
        _criterion("method-a-brute-force", ok, "300 questions, 50-word synthetic set")

    def test_method_a_accuracy_monotone(self):
        rs = np.random.RandomState(43)
        words = [f"word{i:02d}" for i in range(50)]
        emb = StaticEmbeddings(words, rs.randn(50, 8))
        questions = []
        for _ in range(1000):
            a, b, c, d = (words[i] for i in rs.choice(50, size=4, replace=False))
            questions.append(AnalogyQuestion(a, b, c, d, "cat", "semantic"))
        (res,) = method_a_evaluate(emb, questions, ns=[1, 5])
        ok = res.accuracy(5) >= res.accuracy(1) and res.asked == 1000
        _criterion("method-a-monotone-topn", ok, "1000 randomized instances")

    def test_csls_matches_brute_force(self):
        rs = np.random.RandomState(44)
        ok = True
        for _ in range(500):
            k = int(rs.randint(1, 4))
            size = int(rs.randint(k + 1, 9))
            dim = int(rs.randint(2, 7))
            candidates = rs.randn(size, dim)
            query = rs.randn(dim)
            mine = list(csls_rank(query, candidates, CslsConfig(k=k)))
            if mine != brute_csls_order(query, candidates, k):
                ok = False
                break
        _criterion("csls-brute-force", ok, "500 instances, size<=8, K in {1,2,3}")

    def test_method_b_equals_method_a_with_mock(self, mock_provider):
        questions = parse_analogy_dataset(MINI_ANALOGY)
        words = []
        seen = set()
        for q in questions:
            for w in (q.a, q.b, q.c, q.d):
                if w not in seen:
                    seen.add(w)
                    words.append(w)
        emb = StaticEmbeddings(
            words, np.vstack([hash_vector(w, 16, salt="LSTM1") for w in words])
        )
        a_res = method_a_evaluate(emb, questions, ns=[1, 5])
        b_res = method_b_evaluate(
            mock_provider,
            questions,
            load_template("en"),
            words,
            ns=[1, 5],
            layer="LSTM1",
            ranking="cosine",
        )
        ok = [(r.category, r.hits, r.asked, r.skipped_oov) for r in a_res] == [
            (r.category, r.hits, r.asked, r.skipped_oov) for r in b_res
        ]
        _criterion("method-b-mock-equivalence", ok, "15 categories, exact hit counts")


class TestMacroF1Oracle:
    def test_macro_f1_matches_confusion_matrix(self):
        rng = random.Random(77)
        labels = ["PER", "LOC", "ORG", "O"]
        ok = True
        for _ in range(1000):
            n = rng.randint(1, 20)
            gold = [rng.choice(labels) for _ in range(n)]
            pred = [rng.choice(labels) for _ in range(n)]
            tokens = [f"t{i}" for i in range(n)]
            score = macro_f1([NerSentence(tokens, gold)], [NerSentence(tokens, pred)])
            if score.macro_f1 != brute_macro_f1(gold, pred):
                ok = False
                break
        perfect = [NerSentence(["a", "b", "c"], ["PER", "LOC", "ORG"])]
        ok = ok and macro_f1(perfect, perfect).macro_f1 == 1.0
        all_o = [NerSentence(["a", "b", "c"], ["O", "O", "O"])]
        ok = ok and macro_f1(perfect, all_o).macro_f1 == 0.0
        _criterion("macro-f1-oracle", ok, "1000 random pairs plus edge cases")


class TestPipelineDeterminism:
    def test_two_runs_byte_identical(self, tmp_path, monkeypatch):
        digests = []
        for run_dir in ("one", "two"):
            root = tmp_path / run_dir
            root.mkdir()
            monkeypatch.chdir(root)
            cfg = PipelineConfig.from_file(make_workspace(root))
            assert run_pipeline(cfg, ALL_STAGES) == 0
            snapshot = {}
            for name in ARTIFACTS:
                snapshot[name] = (root / name).read_bytes()
                manifest = name + ".manifest.json"
                if (root / manifest).exists():
                    snapshot[manifest] = (root / manifest).read_bytes()
            digests.append(snapshot)
        ok = digests[0] == digests[1] and len(digests[0]) > len(ARTIFACTS)
        _criterion("pipeline-determinism", ok, f"{len(digests[0])} files byte-identical")


class TestAveragingDeterminism:
    def test_shard_counts_agree(self):
        rs = np.random.RandomState(11)
        tokens = [f"tok{i:03d}" for i in range(200)]
        records = []
        for i in range(10_000):
            token = tokens[int(rs.randint(0, 200))]
            records.append(
                TokenEmbeddingRecord(
                    sentence_id=str(i // 20 + 1),
                    position=i % 20,
                    token=token,
                    layer="LSTM1",
                    vector=rs.randn(32),
                )
            )
        base = average_occurrences(iter(records), "LSTM1", shards=1)
        ok = True
        for shards in (4, 16):
            other = average_occurrences(iter(records), "LSTM1", shards=shards)
            if other.vocab != base.vocab:
                ok = False
                break
            if not np.allclose(other.matrix, base.matrix, rtol=1e-9, atol=1e-12):
                ok = False
                break
        _criterion("averaging-shard-determinism", ok, "10k records, shards 1/4/16 at 1e-9")
