"""Acceptance suite: one test per release criterion, with its time budget.

Run with `pytest -s tests/test_acceptance.py` to see one PASS line per
criterion. Every tolerance is fixed here; nothing is calibrated after the
fact.
"""

import io
import itertools
import time
from contextlib import contextmanager, redirect_stdout

import numpy as np
import pytest
from fastapi.testclient import TestClient

from lectern.cli import main as cli_main
from lectern.evaluation import edit_distance, f_measure, word_error_rate, lecture_tokens
from lectern.lm import (
    Document,
    TrigramModel,
    Vocabulary,
    build_vocab,
    load_model,
    perplexity,
    save_model,
    select_corpus,
    train_trigram,
    truncate_to_budget,
)
from lectern.noise import NoiseSpec, corrupt_transcript, wer_sweep
from lectern.retrieval import (
    Query,
    build_index,
    load_index,
    query_top_n,
    save_index,
    search,
)
from lectern.segmentation import SpeechUnit, TimedToken, generate_passages
from lectern.service import ServiceConfig, create_app
from lectern.synth import synthetic_collection, two_topic_corpus
from lectern.tokenizer import TokenizerConfig

from conftest import (
    brute_force_ranking,
    make_units,
    random_passages,
    random_query_counts,
)
from table1_fixture import TRIPLES


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL ({time.perf_counter() - start:.1f}s)")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.1f}s)")
    assert elapsed < budget_s, f"{name} exceeded its {budget_s}s budget: {elapsed:.1f}s"


def test_table1_f_consistency():
    with criterion("table1-f-consistency", budget_s=1.0):
        assert len(TRIPLES) == 45
        for lecture, cond, n, r, p, f in TRIPLES:
            assert abs(round(f_measure(r, p), 3) - f) <= 0.0015, (lecture, cond, n)


def test_scoring_oracle_equivalence():
    with criterion("eq2-oracle-equivalence", budget_s=30.0):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            n = int(rng.integers(1, 101))
            passages = random_passages(rng, n, vocab_size=50)
            counts = random_query_counts(rng, vocab_size=50)
            expected = brute_force_ranking(passages, counts, pool_size=n)
            got = search(build_index(passages), Query("q", counts), n)
            assert [r.passage_id for r in got] == [pid for pid, _ in expected]
            for r, (_, s) in zip(got, expected):
                if s != 0.0:
                    assert abs(r.score - s) <= 1e-9 * abs(s)
                else:
                    assert r.score == 0.0


def test_passage_window_count():
    with criterion("passage-window-count", budget_s=5.0):
        rng = np.random.default_rng(7)
        for _ in range(500):
            n_units = int(rng.integers(0, 51))
            n_max = int(rng.integers(1, 11))
            units = make_units([f"w{i}" for i in range(n_units)])
            passages = generate_passages(units, n_max)
            formula = sum(
                n_units - w + 1 for w in range(1, min(n_max, n_units) + 1)
            )
            brute = [
                (s, s + w)
                for w in range(1, min(n_max, n_units) + 1)
                for s in range(0, n_units - w + 1)
            ]
            assert len(passages) == formula
            assert sorted(p.unit_span for p in passages) == sorted(brute)


def _tensor_all_pairs_distances(seqs: list[tuple[int, ...]], maxlen: int) -> np.ndarray:
    """Edit distance for every sequence pair at once, vectorized DP."""
    n = len(seqs)
    pad = np.full((n, maxlen), -1, dtype=np.int8)
    lens = np.zeros(n, dtype=np.int64)
    for i, s in enumerate(seqs):
        lens[i] = len(s)
        if s:
            pad[i, : len(s)] = s
    prev = np.empty((maxlen + 1, n, n), dtype=np.int16)
    for b in range(maxlen + 1):
        prev[b] = b
    result = np.empty((n, n), dtype=np.int16)
    col_idx = np.broadcast_to(lens[None, None, :], (1, n, n))

    def endpoints(table: np.ndarray) -> np.ndarray:
        return np.take_along_axis(table, col_idx, axis=0)[0]

    result[lens == 0, :] = endpoints(prev)[lens == 0, :]
    cur = np.empty_like(prev)
    for a in range(1, maxlen + 1):
        cur[0] = a
        ca = pad[:, a - 1][:, None]
        for b in range(1, maxlen + 1):
            cb = pad[:, b - 1][None, :]
            sub = prev[b - 1] + (ca != cb)
            cur[b] = np.minimum(sub, np.minimum(prev[b], cur[b - 1]) + 1)
        prev, cur = cur, prev
        done = lens == a
        result[done, :] = endpoints(prev)[done, :]
    return result


def _exhaustive_edit_distance(a: tuple, b: tuple) -> int:
    # No tables, no memo: minimum over all edit scripts by recursion.
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        _exhaustive_edit_distance(a[1:], b[1:]) + (0 if a[0] == b[0] else 1),
        _exhaustive_edit_distance(a[1:], b) + 1,
        _exhaustive_edit_distance(a, b[1:]) + 1,
    )


def test_wer_oracle_exhaustive():
    with criterion("wer-oracle-exhaustive", budget_s=60.0):
        seqs = []
        for length in range(7):
            seqs.extend(itertools.product(range(3), repeat=length))
        oracle = _tensor_all_pairs_distances(seqs, maxlen=6)
        assert np.array_equal(oracle, oracle.T)

        # Anchor the tensor oracle to a direct exhaustive search on the
        # complete sub-universe of lengths <= 3.
        short = [s for s in seqs if len(s) <= 3]
        index_of = {s: i for i, s in enumerate(seqs)}
        for a in short:
            for b in short:
                assert oracle[index_of[a], index_of[b]] == _exhaustive_edit_distance(a, b)

        # The implementation numerator matches the oracle on every pair.
        strs = [[str(c) for c in s] for s in seqs]
        n = len(strs)
        for i in range(n):
            row = oracle[i]
            si = strs[i]
            for j in range(i, n):
                d = edit_distance(si, strs[j])
                assert d == row[j]
        # And WER itself is that numerator over the reference length.
        assert word_error_rate(["0", "1"], ["0", "2", "1"]) == pytest.approx(1 / 2)
        assert word_error_rate(["0"], ["1", "2", "0"]) == pytest.approx(2.0)


def test_lm_normalization_and_trivial_perplexities():
    with criterion("lm-normalization-and-trivial-pp", budget_s=60.0):
        rng = np.random.default_rng(5)
        terms = [f"w{i}" for i in range(30)]
        lines = [
            " ".join(terms[int(j)] for j in rng.integers(0, 30, size=rng.integers(2, 12)))
            for _ in range(40)
        ]
        vocab = build_vocab([Document("d", "\n".join(lines))], cap=25)
        model = train_trigram([Document("d", "\n".join(lines))], vocab)
        context_pool = list(vocab.terms) + ["<s>", "</s>", "<unk>", "zzz-unseen"]
        outcomes = model.outcomes()
        for _ in range(1000):
            u = context_pool[int(rng.integers(len(context_pool)))]
            v = context_pool[int(rng.integers(len(context_pool)))]
            total = sum(model.prob(w, (u, v)) for w in outcomes)
            assert abs(total - 1.0) <= 1e-6, (u, v, total)

        uniform = TrigramModel.uniform(Vocabulary(tuple(f"t{i}" for i in range(53))))
        assert perplexity(uniform, ["t0", "t5", "t52"]) == pytest.approx(53.0, abs=1e-9)
        hundred = TrigramModel.uniform(
            Vocabulary(tuple(f"t{i}" for i in range(100)))
        )
        assert perplexity(hundred, ["t42"]) == pytest.approx(100.0, abs=1e-9)


def test_noise_calibration():
    with criterion("noise-calibration", budget_s=120.0):
        tokens = tuple(
            TimedToken(f"w{i}", i * 10, i * 10 + 8) for i in range(10_000)
        )
        units = [SpeechUnit(0, "lec", tokens)]
        ref = [t.surface for t in tokens]
        confusion = tuple(f"c{i}" for i in range(50))
        for seed in range(5):
            spec = NoiseSpec(0.2, 0.1, 0.1, seed=seed, confusion_vocab=confusion)
            hyp = lecture_tokens(corrupt_transcript(units, spec))
            wer = word_error_rate(ref, hyp)
            assert abs(wer - 0.40) <= 0.02, (seed, wer)


@pytest.fixture(scope="module")
def bundled_collection():
    return synthetic_collection(
        n_lectures=5, units_per_lecture=200, queries_per_lecture=8, seed=7
    )


def test_robustness_experiment(bundled_collection):
    with criterion("robustness-experiment", budget_s=600.0):
        synth = bundled_collection
        assert len(synth.collection.lectures) >= 5
        assert all(
            len(v["reference"]) >= 200 for v in synth.collection.lectures.values()
        )
        report = wer_sweep(
            synth.collection,
            [0.0, 0.2, 0.4, 0.6],
            {"paragraph": synth.long_queries, "keyword": synth.short_queries},
            seed=0,
            n_seeds=5,
        )
        for query_set in report.query_sets:
            fs = [report.cells[(query_set, t)].mean_f for t in report.targets]
            assert all(
                later <= earlier + 1e-12 for earlier, later in zip(fs, fs[1:])
            ), (query_set, fs)
        paragraph_ratio = report.cells[("paragraph", 0.4)].f_ratio
        keyword_ratio = report.cells[("keyword", 0.4)].f_ratio
        assert paragraph_ratio > keyword_ratio, (paragraph_ratio, keyword_ratio)


def test_adaptation_direction():
    with criterion("adaptation-direction", budget_s=60.0):
        corpus = two_topic_corpus(seed=11)
        selected = select_corpus(corpus.general, corpus.textbook, k=60)
        budget = 2000
        matched_docs = truncate_to_budget(selected, budget)
        mixed_docs = truncate_to_budget(corpus.general, budget)
        vocab = build_vocab(corpus.general, cap=20_000)
        pp_matched = perplexity(train_trigram(matched_docs, vocab), corpus.test_tokens)
        pp_mixed = perplexity(train_trigram(mixed_docs, vocab), corpus.test_tokens)
        assert pp_matched < pp_mixed, (pp_matched, pp_mixed)


def test_group_disjointness_and_determinism(bundled_collection):
    with criterion("group-disjointness-determinism", budget_s=120.0):
        synth = bundled_collection
        units = [
            u
            for lec in sorted(synth.collection.lectures)
            for u in synth.collection.lectures[lec]["reference"]
        ]
        index = build_index(generate_passages(units, 5))
        vocab = sorted(index.postings)
        rng = np.random.default_rng(99)
        queries = []
        for _ in range(1000):
            k = int(rng.integers(1, 7))
            picks = rng.choice(len(vocab), size=k, replace=True)
            queries.append(" ".join(vocab[int(i)] for i in picks))
        first_pass = []
        for text in queries:
            groups = query_top_n(index, text, 5, 50)
            seen: set[tuple[str, int]] = set()
            for g in groups:
                units_covered = {(g.lecture_id, u) for u in g.unit_ids()}
                assert not (units_covered & seen)
                seen |= units_covered
            first_pass.append(groups)
        for text, before in zip(queries, first_pass):
            assert query_top_n(index, text, 5, 50) == before


def test_index_and_lm_round_trip(tmp_path):
    with criterion("index-and-lm-round-trip", budget_s=60.0):
        rng = np.random.default_rng(31)
        passages = random_passages(rng, 60)
        index = build_index(passages)
        save_index(index, tmp_path / "idx")
        loaded_index = load_index(tmp_path / "idx")

        lines = [
            " ".join(f"w{int(j)}" for j in rng.integers(0, 25, size=10))
            for _ in range(30)
        ]
        docs = [Document("d", "\n".join(lines))]
        model = train_trigram(docs, build_vocab(docs, cap=20))
        save_model(model, tmp_path / "model")
        loaded_model = load_model(tmp_path / "model")

        for _ in range(100):
            counts = random_query_counts(rng)
            q = Query("q", counts)
            assert search(index, q, 30) == search(loaded_index, q, 30)
            test_tokens = [
                f"w{int(j)}" for j in rng.integers(0, 30, size=rng.integers(1, 15))
            ]
            assert perplexity(model, test_tokens) == perplexity(
                loaded_model, test_tokens
            )


def test_service_parity(tmp_path, bundled_collection):
    with criterion("service-parity", budget_s=120.0):
        synth = bundled_collection
        col_root = synth.write(tmp_path / "col")
        units_paths = sorted(
            str(p) for p in (col_root / "lectures").glob("*/reference.tsv")
        )
        assert (
            cli_main(
                ["index"]
                + [arg for p in units_paths for arg in ("--units", p)]
                + ["--out", str(tmp_path / "idx")]
            )
            == 0
        )
        client = TestClient(
            create_app(ServiceConfig(index_path=str(tmp_path / "idx")))
        )
        rng = np.random.default_rng(555)
        pool_texts = list(synth.long_queries.values()) + list(
            synth.short_queries.values()
        )
        vocab = sorted({t for text in pool_texts for t in text.split()})
        for probe in range(50):
            if probe % 2 == 0:
                text = pool_texts[int(rng.integers(len(pool_texts)))]
            else:
                k = int(rng.integers(1, 6))
                text = " ".join(
                    vocab[int(i)] for i in rng.integers(0, len(vocab), size=k)
                )
            buf = io.StringIO()
            with redirect_stdout(buf):
                code = cli_main(
                    ["query", "--index", str(tmp_path / "idx"),
                     "--text", text, "--top", "3", "--pool", "50"]
                )
            assert code == 0
            resp = client.post(
                "/query",
                json={"text": text, "top_n": 3, "pool_size": 50, "format": "tsv"},
            )
            assert resp.status_code == 200
            assert resp.content == buf.getvalue().encode("utf-8")
