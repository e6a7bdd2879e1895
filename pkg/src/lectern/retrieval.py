"""Inverted index over passages and probabilistic relevance scoring.

The score of passage p for query q is

    sum_t f_tq * ((K+1) * f_tp) / (K * ((1-b) + dl_p / (b * avgdl)) + f_tp)
          * ln((N - n_t + 0.5) / (n_t + 0.5))

with term frequencies f_tq / f_tp, passage length dl_p, collection size N,
document frequency n_t and mean length avgdl. The "paper" length
normalization dl_p/(b*avgdl) is the default; "standard" switches to the
usual Okapi form (1-b) + b*dl_p/avgdl. Logs are natural. Temporally
overlapping results are merged into groups scored by the mean of their
members.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .segmentation import Passage
from .tokenizer import TokenizerConfig, tokenize

DEFAULT_POOL_SIZE = 50

INDEX_FORMAT = "lectern-index"
INDEX_VERSION = 1


class IndexIntegrityError(ValueError):
    """Inconsistent index input (duplicate ids, unknown passage, ...)."""


class IndexLoadError(ValueError):
    """Index file is missing, truncated, corrupt, or of the wrong version."""


@dataclass(frozen=True)
class ScoringParams:
    K: float = 2.0
    b: float = 0.8
    idf_clamp: bool = False
    formula_variant: str = "paper"  # "paper" or "standard"

    def __post_init__(self) -> None:
        if self.K <= 0:
            raise ValueError("K must be positive")
        if not 0 < self.b <= 1:
            raise ValueError("b must be in (0, 1]")
        if self.formula_variant not in ("paper", "standard"):
            raise ValueError(f"unknown formula variant {self.formula_variant!r}")

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "b": self.b,
            "idf_clamp": self.idf_clamp,
            "formula_variant": self.formula_variant,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoringParams":
        return cls(d["K"], d["b"], d["idf_clamp"], d["formula_variant"])


@dataclass(frozen=True)
class PassageMeta:
    lecture_id: str
    unit_span: tuple[int, int]
    start_ms: int
    end_ms: int
    dl: int


@dataclass(frozen=True)
class Query:
    raw_text: str
    term_counts: dict[str, int]


@dataclass(frozen=True)
class ScoredPassage:
    passage_id: int
    score: float
    lecture_id: str
    unit_span: tuple[int, int]
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class PassageGroup:
    """Transitively overlapping scored passages merged into one result."""

    members: tuple[ScoredPassage, ...]
    lecture_id: str
    unit_span: tuple[int, int]
    start_ms: int
    end_ms: int
    score: float

    def unit_ids(self) -> range:
        return range(self.unit_span[0], self.unit_span[1])


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[int, int]]]  # term -> [(passage_id, f_tp)]
    passages: dict[int, PassageMeta]
    avgdl: float
    params: ScoringParams
    tokenizer: TokenizerConfig

    @property
    def corpus_size(self) -> int:
        return len(self.passages)

    def doc_freq(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def make_query(self, text: str) -> Query:
        """Tokenize query text with this index's tokenizer configuration."""
        counts: dict[str, int] = {}
        for term in tokenize(text, self.tokenizer):
            counts[term] = counts.get(term, 0) + 1
        return Query(text, counts)


def build_index(
    passages: list[Passage],
    params: ScoringParams | None = None,
    tokenizer: TokenizerConfig | None = None,
) -> InvertedIndex:
    """Build postings and corpus statistics from passages with unique ids."""
    params = params if params is not None else ScoringParams()
    tokenizer = tokenizer if tokenizer is not None else TokenizerConfig()
    postings: dict[str, list[tuple[int, int]]] = {}
    metas: dict[int, PassageMeta] = {}
    total_dl = 0
    for p in passages:
        if p.passage_id in metas:
            raise IndexIntegrityError(f"duplicate passage_id {p.passage_id}")
        metas[p.passage_id] = PassageMeta(
            p.lecture_id, p.unit_span, p.start_ms, p.end_ms, p.dl
        )
        total_dl += p.dl
        for term, count in p.term_counts.items():
            postings.setdefault(term, []).append((p.passage_id, count))
    avgdl = total_dl / len(metas) if metas else 0.0
    return InvertedIndex(postings, metas, avgdl, params, tokenizer)


def _idf(index: InvertedIndex, term: str) -> float:
    n_t = index.doc_freq(term)
    return math.log((index.corpus_size - n_t + 0.5) / (n_t + 0.5))


def _length_norm(params: ScoringParams, dl: int, avgdl: float) -> float:
    if params.formula_variant == "standard":
        return (1.0 - params.b) + params.b * dl / avgdl
    return (1.0 - params.b) + dl / (params.b * avgdl)


def _term_score(
    params: ScoringParams, f_tq: int, f_tp: int, dl: int, avgdl: float, idf: float
) -> float:
    tf_part = ((params.K + 1.0) * f_tp) / (
        params.K * _length_norm(params, dl, avgdl) + f_tp
    )
    return f_tq * tf_part * idf


def score_passage(query: Query, passage_id: int, index: InvertedIndex) -> float:
    """Relevance score of one passage; the exact sum over shared terms."""
    meta = index.passages.get(passage_id)
    if meta is None:
        raise IndexIntegrityError(f"unknown passage_id {passage_id}")
    score = 0.0
    for term, f_tq in query.term_counts.items():
        f_tp = 0
        for pid, count in index.postings.get(term, ()):
            if pid == passage_id:
                f_tp = count
                break
        if f_tp == 0:
            continue
        idf = _idf(index, term)
        if index.params.idf_clamp and idf <= 0:
            continue
        score += _term_score(index.params, f_tq, f_tp, meta.dl, index.avgdl, idf)
    return score


def search(
    index: InvertedIndex, query: Query, pool_size: int = DEFAULT_POOL_SIZE
) -> list[ScoredPassage]:
    """Score every candidate passage and return the top pool_size.

    With idf clamping on, only positive scores survive; with it off, any
    nonzero score does. Ties break by earlier start_ms, then passage_id.
    """
    if pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    accum: dict[int, float] = {}
    for term, f_tq in query.term_counts.items():
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = _idf(index, term)
        if index.params.idf_clamp and idf <= 0:
            continue
        for pid, f_tp in plist:
            dl = index.passages[pid].dl
            accum[pid] = accum.get(pid, 0.0) + _term_score(
                index.params, f_tq, f_tp, dl, index.avgdl, idf
            )
    if index.params.idf_clamp:
        kept = [(pid, s) for pid, s in accum.items() if s > 0.0]
    else:
        kept = [(pid, s) for pid, s in accum.items() if s != 0.0]
    kept.sort(key=lambda it: (-it[1], index.passages[it[0]].start_ms, it[0]))
    result = []
    for pid, s in kept[:pool_size]:
        meta = index.passages[pid]
        result.append(
            ScoredPassage(pid, s, meta.lecture_id, meta.unit_span, meta.start_ms, meta.end_ms)
        )
    return result


def merge_overlaps(ranked: list[ScoredPassage]) -> list[PassageGroup]:
    """Merge passages whose unit spans overlap (same lecture) into groups.

    Groups are connected components under transitive span overlap; a group's
    score is the arithmetic mean of its members' scores. Sorted by score
    descending, ties by (lecture_id, span).
    """
    parent = list(range(len(ranked)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    by_lecture: dict[str, list[int]] = {}
    for i, sp in enumerate(ranked):
        by_lecture.setdefault(sp.lecture_id, []).append(i)
    for indices in by_lecture.values():
        # Sweep in span order: intervals overlap transitively iff each one
        # starts before the running maximum end of its component.
        indices.sort(key=lambda i: ranked[i].unit_span)
        run_end = None
        prev = None
        for i in indices:
            lo, hi = ranked[i].unit_span
            if run_end is not None and lo < run_end:
                union(prev, i)
                run_end = max(run_end, hi)
            else:
                run_end = hi
            prev = i
    components: dict[int, list[ScoredPassage]] = {}
    for i, sp in enumerate(ranked):
        components.setdefault(find(i), []).append(sp)
    groups = []
    for members in components.values():
        spans = [m.unit_span for m in members]
        span = (min(s[0] for s in spans), max(s[1] for s in spans))
        groups.append(
            PassageGroup(
                members=tuple(members),
                lecture_id=members[0].lecture_id,
                unit_span=span,
                start_ms=min(m.start_ms for m in members),
                end_ms=max(m.end_ms for m in members),
                score=sum(m.score for m in members) / len(members),
            )
        )
    groups.sort(key=lambda g: (-g.score, g.lecture_id, g.unit_span))
    return groups


def query_top_n(
    index: InvertedIndex,
    query_text: str,
    top_n: int,
    pool_size: int = DEFAULT_POOL_SIZE,
) -> list[PassageGroup]:
    """tokenize -> search -> merge overlaps -> truncate to the top_n groups."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    query = index.make_query(query_text)
    return merge_overlaps(search(index, query, pool_size))[:top_n]


def save_index(index: InvertedIndex, path: str | os.PathLike) -> None:
    doc = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "tokenizer": index.tokenizer.to_dict(),
        "params": index.params.to_dict(),
        "N": index.corpus_size,
        "avgdl": index.avgdl,
        "passages": [
            [pid, m.lecture_id, m.unit_span[0], m.unit_span[1], m.start_ms, m.end_ms, m.dl]
            for pid, m in index.passages.items()
        ],
        "postings": {t: plist for t, plist in index.postings.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)


def load_index(path: str | os.PathLike) -> InvertedIndex:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise IndexLoadError(f"cannot read index file {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != INDEX_FORMAT:
        raise IndexLoadError(f"{path} is not an index file")
    if doc.get("version") != INDEX_VERSION:
        raise IndexLoadError(
            f"unsupported index version {doc.get('version')} (expected {INDEX_VERSION})"
        )
    try:
        passages = {
            int(pid): PassageMeta(lec, (int(lo), int(hi)), int(s), int(e), int(dl))
            for pid, lec, lo, hi, s, e, dl in doc["passages"]
        }
        postings = {
            term: [(int(pid), int(tf)) for pid, tf in plist]
            for term, plist in doc["postings"].items()
        }
        index = InvertedIndex(
            postings=postings,
            passages=passages,
            avgdl=float(doc["avgdl"]),
            params=ScoringParams.from_dict(doc["params"]),
            tokenizer=TokenizerConfig.from_dict(doc["tokenizer"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IndexLoadError(f"index file {path} is corrupt: {exc}") from None
    if len(doc["passages"]) != doc["N"]:
        raise IndexLoadError(f"index file {path} is corrupt: passage count mismatch")
    return index


def format_groups_tsv(groups: list[PassageGroup]) -> str:
    """Machine-readable result listing, one group per line.

    `rank<TAB>score<TAB>lecture_id<TAB>start_ms<TAB>end_ms<TAB>unit_ids`
    with unit_ids comma-separated. Scores use repr for exact round-trips.
    """
    lines = []
    for rank, g in enumerate(groups, start=1):
        unit_ids = ",".join(str(u) for u in g.unit_ids())
        lines.append(
            f"{rank}\t{g.score!r}\t{g.lecture_id}\t{g.start_ms}\t{g.end_ms}\t{unit_ids}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
