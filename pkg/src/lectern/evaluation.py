"""Benchmark metrics and the end-to-end evaluation harness.

WER is minimum-edit-distance word errors over reference length. Retrieval
quality is recall/precision/F over speech units: retrieved groups expand to
their unit sets, each unit counted once. run_benchmark drives the full
pipeline (passages -> index -> query -> merge) for every condition of a test
collection and emits a report table with per-lecture OOV/PP/WER and R/P/F
per result-list depth, averaged over queries.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .lm import TrigramModel, oov_rate, perplexity
from .retrieval import (
    DEFAULT_POOL_SIZE,
    PassageGroup,
    ScoringParams,
    build_index,
    query_top_n,
)
from .segmentation import DEFAULT_N_MAX, SpeechUnit, generate_passages, parse_unit_lines
from .tokenizer import TokenizerConfig

Unit = tuple[str, int]  # (lecture_id, unit_id)

REFERENCE_VARIANT = "reference"


class CollectionError(ValueError):
    """Missing or inconsistent test-collection pieces."""


@dataclass
class Qrels:
    relevant: dict[str, set[Unit]]  # query_id -> relevant speech units

    def for_query(self, query_id: str) -> set[Unit]:
        return self.relevant.get(query_id, set())


@dataclass
class TestCollection:
    __test__ = False  # not a pytest class, despite the name

    lectures: dict[str, dict[str, list[SpeechUnit]]]  # lecture -> variant -> units
    queries: dict[str, str]  # query_id -> query text
    qrels: Qrels
    textbooks: dict[str, list[str]] = field(default_factory=dict)

    def validate(self) -> None:
        for qid in self.qrels.relevant:
            if qid not in self.queries:
                raise CollectionError(f"qrels references unknown query {qid!r}")
        for qid, units in self.qrels.relevant.items():
            for lecture_id, unit_id in units:
                variants = self.lectures.get(lecture_id)
                if variants is None:
                    raise CollectionError(
                        f"qrels for {qid!r} references unknown lecture {lecture_id!r}"
                    )
                n_units = len(variants[REFERENCE_VARIANT])
                if not 0 <= unit_id < n_units:
                    raise CollectionError(
                        f"qrels for {qid!r} references unit {unit_id} outside "
                        f"lecture {lecture_id!r} (has {n_units} units)"
                    )

    def query_lecture(self, query_id: str) -> str:
        """The lecture a query targets, taken from its relevance judgments."""
        units = self.qrels.for_query(query_id)
        if not units:
            raise CollectionError(f"query {query_id!r} has no relevance judgments")
        lectures = {lecture_id for lecture_id, _ in units}
        if len(lectures) != 1:
            raise CollectionError(
                f"query {query_id!r} has judgments in multiple lectures"
            )
        return next(iter(lectures))


def word_error_rate(reference: list[str], hypothesis: list[str]) -> float:
    """(substitutions + deletions + insertions) / |reference|, unit costs."""
    if not reference:
        raise ValueError("reference must be non-empty")
    return edit_distance(reference, hypothesis) / len(reference)


def edit_distance(a: list[str], b: list[str]) -> int:
    """Levenshtein distance with unit costs."""
    if len(a) * len(b) > 10_000:
        return _edit_distance_rows(a, b)
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j - 1], prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def _edit_distance_rows(a: list[str], b: list[str]) -> int:
    # Vectorized row update; the left-to-right insertion dependency becomes
    # a prefix minimum over (candidate cost - column index).
    import numpy as np

    codes: dict[str, int] = {}
    a_ids = np.fromiter((codes.setdefault(t, len(codes)) for t in a), dtype=np.int64)
    b_ids = np.fromiter((codes.setdefault(t, len(codes)) for t in b), dtype=np.int64)
    m = len(b)
    cols = np.arange(m + 1, dtype=np.int64)
    prev = cols.copy()
    f = np.empty(m + 1, dtype=np.int64)
    for i in range(1, len(a) + 1):
        base = np.minimum(prev[:-1] + (b_ids != a_ids[i - 1]), prev[1:] + 1)
        f[0] = i
        f[1:] = base - cols[1:]
        cur = np.minimum.accumulate(f) + cols
        prev = cur
    return int(prev[m])


def f_measure(recall: float, precision: float) -> float:
    """Harmonic mean of recall and precision; 0 when both are 0."""
    if recall + precision == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def group_units(groups: list[PassageGroup]) -> set[Unit]:
    """All speech units covered by the retrieved groups, without duplicates."""
    units: set[Unit] = set()
    for g in groups:
        units.update((g.lecture_id, u) for u in g.unit_ids())
    return units


def recall_precision_f(
    retrieved: list[PassageGroup], relevant: set[Unit]
) -> tuple[float, float, float]:
    """Unit-level recall, precision, and F for one query's result list."""
    if not relevant:
        raise ValueError("relevant unit set must be non-empty")
    got = group_units(retrieved)
    hits = len(got & relevant)
    recall = hits / len(relevant)
    precision = hits / len(got) if got else 0.0
    return recall, precision, f_measure(recall, precision)


@dataclass(frozen=True)
class EvalCondition:
    """One column of the report: a transcript variant plus an optional LM."""

    name: str
    variant: str
    lm: TrigramModel | None = None


@dataclass
class RetrievalCell:
    recall: float
    precision: float
    f: float  # F of the averaged recall/precision
    f_mean_per_query: float  # mean of per-query F values


@dataclass
class LectureResult:
    wer: float
    oov: float | None
    pp: float | None
    retrieval: dict[int, RetrievalCell]  # top_n -> averaged metrics


@dataclass
class EvalReport:
    top_ns: list[int]
    conditions: list[str]
    lectures: list[str]
    cells: dict[tuple[str, str], LectureResult]  # (lecture, condition) -> result

    def to_json(self) -> str:
        doc = {
            "top_ns": self.top_ns,
            "conditions": self.conditions,
            "lectures": self.lectures,
            "results": {
                f"{lec}/{cond}": {
                    "wer": res.wer,
                    "oov": res.oov,
                    "pp": res.pp,
                    "retrieval": {
                        str(n): {
                            "recall": cell.recall,
                            "precision": cell.precision,
                            "f": cell.f,
                            "f_mean_per_query": cell.f_mean_per_query,
                        }
                        for n, cell in res.retrieval.items()
                    },
                }
                for (lec, cond), res in self.cells.items()
            },
        }
        return json.dumps(doc, indent=2)

    def render_table(self) -> str:
        return render_report_table(self)


def fmt3(x: float | None) -> str:
    """Three decimals with the leading zero dropped (".695" style)."""
    if x is None:
        return "---"
    s = f"{x:.3f}"
    if s.startswith("0."):
        return s[1:]
    if s.startswith("-0."):
        return "-" + s[2:]
    return s


def fmt_pp(x: float | None) -> str:
    if x is None:
        return "---"
    return f"{x:.3g}"


def render_report_table(report: EvalReport) -> str:
    """Plain-text table: lectures as column groups, conditions as columns."""
    n_conds = max(len(report.conditions), 1)
    longest_lecture = max((len(lec) for lec in report.lectures), default=0)
    longest_cond = max((len(c) for c in report.conditions), default=0)
    width = max(8, longest_cond + 1, -(-(longest_lecture + 1) // n_conds))
    lines = []
    header1 = ["lecture".ljust(10)]
    header2 = ["".ljust(10)]
    for lec in report.lectures:
        span = len(report.conditions) * width
        header1.append(lec.ljust(span))
        for cond in report.conditions:
            header2.append(cond.ljust(width))
    lines.append("".join(header1))
    lines.append("".join(header2))

    def row(label: str, value) -> str:
        parts = [label.ljust(10)]
        for lec in report.lectures:
            for cond in report.conditions:
                parts.append(value(report.cells[(lec, cond)]).ljust(width))
        return "".join(parts)

    lines.append(row("OOV", lambda r: fmt3(r.oov)))
    lines.append(row("PP", lambda r: fmt_pp(r.pp)))
    lines.append(row("WER", lambda r: fmt3(r.wer)))
    for n in report.top_ns:
        lines.append(row(f"N={n} R", lambda r, n=n: fmt3(r.retrieval[n].recall)))
        lines.append(row(f"N={n} P", lambda r, n=n: fmt3(r.retrieval[n].precision)))
        lines.append(row(f"N={n} F", lambda r, n=n: fmt3(r.retrieval[n].f)))
    return "\n".join(lines) + "\n"


def lecture_tokens(units: list[SpeechUnit]) -> list[str]:
    tokens: list[str] = []
    for u in units:
        tokens.extend(t.surface for t in u.tokens)
    return tokens


def run_benchmark(
    collection: TestCollection,
    conditions: list[EvalCondition],
    top_ns: list[int],
    n_max: int = DEFAULT_N_MAX,
    params: ScoringParams | None = None,
    tokenizer: TokenizerConfig | None = None,
    pool_size: int = DEFAULT_POOL_SIZE,
) -> EvalReport:
    """Run every condition over every lecture's queries and tabulate metrics.

    Each query is evaluated against an index over its own lecture (judgments
    are per lecture); recall and precision are averaged over the lecture's
    queries, with F reported both as the F of the averages and as the mean
    per-query F.
    """
    collection.validate()
    missing = [
        f"{lec}:{cond.variant}"
        for cond in conditions
        for lec, variants in collection.lectures.items()
        if cond.variant not in variants
    ]
    if missing:
        raise CollectionError("missing transcript variants: " + ", ".join(missing))

    queries_by_lecture: dict[str, list[str]] = {lec: [] for lec in collection.lectures}
    for qid in collection.queries:
        queries_by_lecture[collection.query_lecture(qid)].append(qid)

    lectures = sorted(collection.lectures)
    report = EvalReport(
        top_ns=list(top_ns),
        conditions=[c.name for c in conditions],
        lectures=lectures,
        cells={},
    )
    for cond in conditions:
        for lec in lectures:
            units = collection.lectures[lec][cond.variant]
            ref_tokens = lecture_tokens(collection.lectures[lec][REFERENCE_VARIANT])
            hyp_tokens = lecture_tokens(units)
            wer = word_error_rate(ref_tokens, hyp_tokens)
            oov = pp = None
            if cond.lm is not None:
                oov = oov_rate(cond.lm.vocab, ref_tokens)
                pp = perplexity(cond.lm, ref_tokens)
            passages = generate_passages(units, n_max, tokenizer)
            index = build_index(passages, params, tokenizer)
            retrieval: dict[int, RetrievalCell] = {}
            for n in top_ns:
                r_sum = p_sum = f_sum = 0.0
                qids = queries_by_lecture[lec]
                for qid in qids:
                    groups = query_top_n(
                        index, collection.queries[qid], n, pool_size
                    )
                    r, p, f = recall_precision_f(groups, collection.qrels.for_query(qid))
                    r_sum += r
                    p_sum += p
                    f_sum += f
                count = len(qids) if qids else 1
                r_avg, p_avg = r_sum / count, p_sum / count
                retrieval[n] = RetrievalCell(
                    recall=r_avg,
                    precision=p_avg,
                    f=f_measure(r_avg, p_avg),
                    f_mean_per_query=f_sum / count,
                )
            report.cells[(lec, cond.name)] = LectureResult(wer, oov, pp, retrieval)
    return report


def load_collection(path: str | os.PathLike) -> TestCollection:
    """Read a collection directory.

    Layout: `queries.tsv` (query_id<TAB>text), `qrels.tsv`
    (query_id<TAB>lecture_id<TAB>unit_id), `lectures/<id>/<variant>.tsv`
    (pre-segmented transcripts, one variant per file, "reference" required),
    and optional `textbooks/<id>.txt` with blank-line-separated paragraphs.
    """
    root = Path(path)
    queries_file = root / "queries.tsv"
    qrels_file = root / "qrels.tsv"
    lectures_dir = root / "lectures"
    for required in (queries_file, qrels_file, lectures_dir):
        if not required.exists():
            raise CollectionError(f"collection is missing {required}")

    queries: dict[str, str] = {}
    for lineno, line in enumerate(
        queries_file.read_text(encoding="utf-8").splitlines(), 1
    ):
        if not line.strip():
            continue
        if "\t" not in line:
            raise CollectionError(f"queries.tsv line {lineno}: expected id<TAB>text")
        qid, text = line.split("\t", 1)
        queries[qid] = text

    relevant: dict[str, set[Unit]] = {}
    for lineno, line in enumerate(
        qrels_file.read_text(encoding="utf-8").splitlines(), 1
    ):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CollectionError(f"qrels.tsv line {lineno}: expected 3 fields")
        qid, lecture_id, unit_s = parts
        relevant.setdefault(qid, set()).add((lecture_id, int(unit_s)))

    lectures: dict[str, dict[str, list[SpeechUnit]]] = {}
    for lecture_dir in sorted(p for p in lectures_dir.iterdir() if p.is_dir()):
        variants = {}
        for f in sorted(lecture_dir.glob("*.tsv")):
            variants[f.stem] = parse_unit_lines(
                f.read_text(encoding="utf-8"), lecture_dir.name
            )
        if REFERENCE_VARIANT not in variants:
            raise CollectionError(
                f"lecture {lecture_dir.name!r} has no reference transcript"
            )
        lectures[lecture_dir.name] = variants

    textbooks: dict[str, list[str]] = {}
    textbook_dir = root / "textbooks"
    if textbook_dir.is_dir():
        for f in sorted(textbook_dir.glob("*.txt")):
            textbooks[f.stem] = split_paragraphs(f.read_text(encoding="utf-8"))

    collection = TestCollection(lectures, queries, Qrels(relevant), textbooks)
    collection.validate()
    return collection


def split_paragraphs(text: str) -> list[str]:
    """Blank-line-separated paragraphs, whitespace-normalized."""
    paragraphs = []
    for block in text.split("\n\n"):
        p = " ".join(block.split())
        if p:
            paragraphs.append(p)
    return paragraphs
