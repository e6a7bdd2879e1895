"""Deterministic synthetic lecture collections and corpora.

Real lecture audio, textbooks, and a Web-scale document collection are not
distributable, so experiments run on generated stand-ins: lectures whose
units mix shared filler words, per-lecture topic words, and rare per-region
keywords concentrated in a small block of relevant units. Each region yields
a paragraph-style query (textbook paragraph) and a 2-keyword query judged
against the same block. Everything derives from one seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import Qrels, TestCollection, Unit
from .lm import Document
from .segmentation import SpeechUnit, TimedToken, format_unit_lines

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


def _word_inventory(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    words: list[str] = []
    while len(words) < count:
        n_syll = int(rng.integers(2, 5))
        w = "".join(
            _CONSONANTS[rng.integers(len(_CONSONANTS))]
            + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(n_syll)
        )
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def _zipf_pick(rng: np.random.Generator, pool: list[str], count: int) -> list[str]:
    # Rank-weighted sampling: early inventory entries appear more often.
    ranks = np.arange(1, len(pool) + 1, dtype=float)
    weights = 1.0 / ranks
    weights /= weights.sum()
    idx = rng.choice(len(pool), size=count, p=weights)
    return [pool[i] for i in idx]


@dataclass
class SyntheticCollection:
    collection: TestCollection
    long_queries: dict[str, str]  # paragraph-style queries
    short_queries: dict[str, str]  # 2-keyword queries

    def write(self, path: str | Path) -> Path:
        """Materialize the collection in the on-disk layout."""
        root = Path(path)
        (root / "lectures").mkdir(parents=True, exist_ok=True)
        (root / "textbooks").mkdir(exist_ok=True)
        col = self.collection
        queries_lines = [f"{qid}\t{text}" for qid, text in col.queries.items()]
        (root / "queries.tsv").write_text(
            "\n".join(queries_lines) + "\n", encoding="utf-8"
        )
        qrels_lines = []
        for qid in col.queries:
            for lec, unit in sorted(col.qrels.for_query(qid)):
                qrels_lines.append(f"{qid}\t{lec}\t{unit}")
        (root / "qrels.tsv").write_text("\n".join(qrels_lines) + "\n", encoding="utf-8")
        for lec, variants in col.lectures.items():
            lec_dir = root / "lectures" / lec
            lec_dir.mkdir(exist_ok=True)
            for variant, units in variants.items():
                (lec_dir / f"{variant}.tsv").write_text(
                    format_unit_lines(units), encoding="utf-8"
                )
        for lec, paragraphs in col.textbooks.items():
            (root / "textbooks" / f"{lec}.txt").write_text(
                "\n\n".join(paragraphs) + "\n", encoding="utf-8"
            )
        return root


def synthetic_collection(
    n_lectures: int = 5,
    units_per_lecture: int = 200,
    queries_per_lecture: int = 8,
    seed: int = 7,
    pause_ms: int = 800,
) -> SyntheticCollection:
    """Build an in-memory test collection with paragraph and keyword queries.

    Each lecture is split into query regions; a contiguous 6-unit block at
    each region's center carries that region's keywords and is the relevant
    unit set for both of the region's queries.
    """
    rng = np.random.default_rng(seed)
    taken: set[str] = set()
    fillers = _word_inventory(rng, 150, taken)

    lectures: dict[str, dict[str, list[SpeechUnit]]] = {}
    queries: dict[str, str] = {}
    relevant: dict[str, set[Unit]] = {}
    textbooks: dict[str, list[str]] = {}
    block_width = 6

    for li in range(n_lectures):
        lecture_id = f"lecture{li + 1}"
        topics = _word_inventory(rng, 80, taken)
        region_size = units_per_lecture // queries_per_lecture
        keyword_sets = [
            _word_inventory(rng, 6, taken) for _ in range(queries_per_lecture)
        ]
        block_starts = [
            r * region_size + (region_size - block_width) // 2
            for r in range(queries_per_lecture)
        ]
        in_block = {}
        for r, start in enumerate(block_starts):
            for u in range(start, start + block_width):
                in_block[u] = r

        units: list[SpeechUnit] = []
        clock = 0
        for u in range(units_per_lecture):
            n_tok = int(rng.integers(9, 13))
            region = in_block.get(u)
            surfaces: list[str] = []
            if region is not None:
                kws = keyword_sets[region]
                surfaces += [kws[rng.integers(len(kws))] for _ in range(4)]
                surfaces += _zipf_pick(rng, topics, 2)
            else:
                surfaces += _zipf_pick(rng, topics, 4)
            surfaces += _zipf_pick(rng, fillers, n_tok - len(surfaces))
            rng.shuffle(surfaces)
            tokens = []
            for s in surfaces:
                tokens.append(TimedToken(s, clock, clock + 300))
                clock += 350
            clock += pause_ms
            units.append(SpeechUnit(u, lecture_id, tuple(tokens)))
        lectures[lecture_id] = {"reference": units}

        paragraphs = []
        for r in range(queries_per_lecture):
            kws = keyword_sets[r]
            block_units = set(
                (lecture_id, u)
                for u in range(block_starts[r], block_starts[r] + block_width)
            )
            long_terms = (
                kws * 2
                + _zipf_pick(rng, topics, 10)
                + _zipf_pick(rng, fillers, 14)
            )
            rng.shuffle(long_terms)
            long_text = " ".join(long_terms)
            short_text = " ".join([kws[i] for i in rng.choice(6, size=2, replace=False)])
            long_id = f"{lecture_id}-p{r + 1}"
            short_id = f"{lecture_id}-k{r + 1}"
            queries[long_id] = long_text
            queries[short_id] = short_text
            relevant[long_id] = set(block_units)
            relevant[short_id] = set(block_units)
            paragraphs.append(long_text)
        textbooks[lecture_id] = paragraphs

    collection = TestCollection(lectures, queries, Qrels(relevant), textbooks)
    collection.validate()
    long_queries = {q: t for q, t in queries.items() if "-p" in q}
    short_queries = {q: t for q, t in queries.items() if "-k" in q}
    return SyntheticCollection(collection, long_queries, short_queries)


@dataclass
class TwoTopicCorpus:
    general: list[Document]
    textbook: str  # topic-A textbook text used as the selection query
    test_tokens: list[str]  # held-out topic-A text
    topic_of: dict[str, str]  # doc_id -> "A" | "B"


def two_topic_corpus(
    seed: int = 11,
    docs_per_topic: int = 120,
    doc_tokens: int = 40,
) -> TwoTopicCorpus:
    """A general corpus mixing two topics, plus topic-A textbook and test text."""
    rng = np.random.default_rng(seed)
    taken: set[str] = set()
    common = _word_inventory(rng, 150, taken)
    topic_words = {
        "A": _word_inventory(rng, 250, taken),
        "B": _word_inventory(rng, 250, taken),
    }

    def make_text(topic: str, n: int) -> str:
        terms = _zipf_pick(rng, topic_words[topic], int(n * 0.6))
        terms += _zipf_pick(rng, common, n - len(terms))
        rng.shuffle(terms)
        return " ".join(terms)

    docs: list[Document] = []
    topic_of: dict[str, str] = {}
    order = ["A", "B"] * docs_per_topic
    rng.shuffle(order)
    for i, topic in enumerate(order):
        doc_id = f"doc{i:04d}"
        docs.append(Document(doc_id, make_text(topic, doc_tokens)))
        topic_of[doc_id] = topic

    textbook = make_text("A", 300)
    test_tokens = make_text("A", 400).split()
    return TwoTopicCorpus(docs, textbook, test_tokens, topic_of)
