"""Shared builders and independent oracles used across the test suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from lectern.segmentation import Passage, SpeechUnit, TimedToken


def make_tokens(gaps_and_durs: list[tuple[int, int]]) -> list[TimedToken]:
    """Tokens laid out left to right: [(gap_before, duration), ...]."""
    tokens = []
    clock = 0
    for i, (gap, dur) in enumerate(gaps_and_durs):
        clock += gap
        tokens.append(TimedToken(f"w{i}", clock, clock + dur))
        clock += dur
    return tokens


def make_units(
    texts: list[str], lecture_id: str = "lec", pause_ms: int = 1000
) -> list[SpeechUnit]:
    """One unit per text, 300ms tokens, units separated by pause_ms."""
    units = []
    clock = 0
    for uid, text in enumerate(texts):
        tokens = []
        for surface in text.split():
            tokens.append(TimedToken(surface, clock, clock + 300))
            clock += 300
        clock += pause_ms
        units.append(SpeechUnit(uid, lecture_id, tuple(tokens)))
    return units


def random_passages(
    rng: np.random.Generator,
    n_passages: int,
    vocab_size: int = 50,
    max_distinct: int = 8,
    max_tf: int = 4,
) -> list[Passage]:
    """Random direct-built passages with sequential ids and spans."""
    vocab = [f"t{i}" for i in range(vocab_size)]
    passages = []
    for pid in range(n_passages):
        n_terms = int(rng.integers(1, max_distinct + 1))
        chosen = rng.choice(vocab_size, size=min(n_terms, vocab_size), replace=False)
        counts = {vocab[i]: int(rng.integers(1, max_tf + 1)) for i in chosen}
        passages.append(
            Passage(
                passage_id=pid,
                lecture_id="lec",
                unit_span=(pid, pid + 1),
                start_ms=pid * 1000,
                end_ms=pid * 1000 + 900,
                term_counts=counts,
                dl=sum(counts.values()),
            )
        )
    return passages


def random_query_counts(
    rng: np.random.Generator, vocab_size: int = 50, max_terms: int = 6, max_tf: int = 3
) -> dict[str, int]:
    n = int(rng.integers(1, max_terms + 1))
    chosen = rng.choice(vocab_size, size=min(n, vocab_size), replace=False)
    return {f"t{i}": int(rng.integers(1, max_tf + 1)) for i in chosen}


def brute_force_scores(
    passages: list[Passage],
    query_counts: dict[str, int],
    K: float = 2.0,
    b: float = 0.8,
    variant: str = "paper",
    idf_clamp: bool = False,
) -> dict[int, float]:
    """Directly substitute every passage into the scoring formula.

    Kept free of the index implementation: statistics are recomputed by
    scanning the raw passages.
    """
    n_total = len(passages)
    avgdl = sum(p.dl for p in passages) / n_total
    doc_freq = {
        term: sum(1 for q in passages if term in q.term_counts)
        for term in query_counts
    }
    scores: dict[int, float] = {}
    for p in passages:
        s = 0.0
        for term, f_tq in query_counts.items():
            f_tp = p.term_counts.get(term, 0)
            if f_tp == 0:
                continue
            n_t = doc_freq[term]
            idf = math.log((n_total - n_t + 0.5) / (n_t + 0.5))
            if idf_clamp and idf <= 0:
                continue
            if variant == "paper":
                norm = (1 - b) + p.dl / (b * avgdl)
            else:
                norm = (1 - b) + b * p.dl / avgdl
            s += f_tq * ((K + 1) * f_tp) / (K * norm + f_tp) * idf
        scores[p.passage_id] = s
    return scores


def brute_force_ranking(
    passages: list[Passage],
    query_counts: dict[str, int],
    pool_size: int,
    idf_clamp: bool = False,
    **kwargs,
) -> list[tuple[int, float]]:
    """Score-all-then-sort reference for search()."""
    scores = brute_force_scores(passages, query_counts, idf_clamp=idf_clamp, **kwargs)
    by_id = {p.passage_id: p for p in passages}
    if idf_clamp:
        kept = [(pid, s) for pid, s in scores.items() if s > 0.0]
    else:
        kept = [(pid, s) for pid, s in scores.items() if s != 0.0]
    kept.sort(key=lambda it: (-it[1], by_id[it[0]].start_ms, it[0]))
    return kept[:pool_size]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
