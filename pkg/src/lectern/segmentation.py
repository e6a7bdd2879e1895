"""Pause-based segmentation of timed transcripts into speech units and passages.

A transcript is a sequence of timed tokens. Tokens separated by a pause longer
than a threshold fall into different speech units; consecutive runs of 1..n_max
units form the variable-length passages that get indexed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections import Counter

from .tokenizer import TokenizerConfig, tokenize

DEFAULT_PAUSE_MS = 500
DEFAULT_N_MAX = 5


class TranscriptError(ValueError):
    """Malformed or inconsistent transcript content."""


@dataclass(frozen=True)
class TimedToken:
    surface: str
    start_ms: int
    end_ms: int

    def __post_init__(self) -> None:
        if not self.surface:
            raise TranscriptError("token surface must be non-empty")
        if self.end_ms < self.start_ms:
            raise TranscriptError(
                f"token {self.surface!r} ends at {self.end_ms} before it starts at {self.start_ms}"
            )


@dataclass(frozen=True)
class SpeechUnit:
    """A pause-delimited run of tokens; the granularity of relevance judgment."""

    unit_id: int
    lecture_id: str
    tokens: tuple[TimedToken, ...]

    @property
    def start_ms(self) -> int:
        return self.tokens[0].start_ms

    @property
    def end_ms(self) -> int:
        return self.tokens[-1].end_ms

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Passage:
    """A window of consecutive speech units, with its term statistics."""

    passage_id: int
    lecture_id: str
    unit_span: tuple[int, int]  # half-open [first_unit, first_unit + width)
    start_ms: int
    end_ms: int
    term_counts: dict[str, int] = field(compare=False)
    dl: int = 0

    @property
    def width(self) -> int:
        return self.unit_span[1] - self.unit_span[0]

    def unit_ids(self) -> range:
        return range(self.unit_span[0], self.unit_span[1])


def _validate_token_order(tokens: list[TimedToken]) -> None:
    for i in range(1, len(tokens)):
        if tokens[i].start_ms < tokens[i - 1].end_ms:
            raise TranscriptError(
                f"tokens out of order: {tokens[i].surface!r} starts at "
                f"{tokens[i].start_ms} before previous token ends at {tokens[i - 1].end_ms}"
            )


def parse_timed_tokens(content: str) -> list[TimedToken]:
    """Parse `surface<TAB>start_ms<TAB>end_ms` lines into a validated token list.

    Blank lines are skipped. Raises TranscriptError naming the offending line.
    """
    tokens: list[TimedToken] = []
    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise TranscriptError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
            )
        surface, start_s, end_s = parts
        try:
            start_ms, end_ms = int(start_s), int(end_s)
        except ValueError:
            raise TranscriptError(f"line {lineno}: non-integer timestamp") from None
        try:
            tokens.append(TimedToken(surface, start_ms, end_ms))
        except TranscriptError as exc:
            raise TranscriptError(f"line {lineno}: {exc}") from None
    _validate_token_order(tokens)
    return tokens


def _spread_stamps(start_ms: int, end_ms: int, n: int) -> list[tuple[int, int]]:
    # Evenly spaced, non-overlapping integer stamps across the unit span.
    span = end_ms - start_ms
    bounds = [start_ms + (span * i) // n for i in range(n)] + [end_ms]
    return [(bounds[i], bounds[i + 1]) for i in range(n)]


def parse_unit_lines(content: str, lecture_id: str = "") -> list[SpeechUnit]:
    """Parse pre-segmented `unit_id<TAB>start_ms<TAB>end_ms<TAB>tokens` lines.

    Unit boundaries are taken as given; per-token stamps are synthesized by
    spreading the unit span evenly. unit_ids must be consecutive from 0.
    """
    units: list[SpeechUnit] = []
    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise TranscriptError(
                f"line {lineno}: expected 4 tab-separated fields, got {len(parts)}"
            )
        uid_s, start_s, end_s, text = parts
        try:
            uid, start_ms, end_ms = int(uid_s), int(start_s), int(end_s)
        except ValueError:
            raise TranscriptError(f"line {lineno}: non-integer field") from None
        if uid != len(units):
            raise TranscriptError(
                f"line {lineno}: unit_id {uid} out of order, expected {len(units)}"
            )
        if end_ms < start_ms:
            raise TranscriptError(f"line {lineno}: unit ends before it starts")
        surfaces = text.split()
        if not surfaces:
            raise TranscriptError(f"line {lineno}: unit has no tokens")
        stamps = _spread_stamps(start_ms, end_ms, len(surfaces))
        tokens = tuple(
            TimedToken(s, t0, t1) for s, (t0, t1) in zip(surfaces, stamps)
        )
        if units and tokens[0].start_ms < units[-1].end_ms:
            raise TranscriptError(f"line {lineno}: unit overlaps the previous unit")
        units.append(SpeechUnit(uid, lecture_id, tokens))
    return units


def parse_transcript(
    content: str, format: str, lecture_id: str = ""
) -> list[TimedToken] | list[SpeechUnit]:
    """Parse transcript content in either supported format.

    "timed" yields TimedTokens (run segment_units next); "units" yields
    SpeechUnits directly, bypassing pause segmentation.
    """
    if format == "timed":
        return parse_timed_tokens(content)
    if format == "units":
        return parse_unit_lines(content, lecture_id)
    raise ValueError(f"unknown transcript format {format!r}")


def segment_units(
    tokens: list[TimedToken], pause_threshold_ms: int = DEFAULT_PAUSE_MS,
    lecture_id: str = "",
) -> list[SpeechUnit]:
    """Split tokens into units wherever the inter-token gap exceeds the threshold.

    Gaps are next.start_ms - prev.end_ms, clamped at 0; abutting tokens never
    split. The concatenation of all units' tokens is exactly the input.
    """
    if pause_threshold_ms <= 0:
        raise ValueError("pause_threshold_ms must be positive")
    _validate_token_order(tokens)
    units: list[SpeechUnit] = []
    current: list[TimedToken] = []
    for tok in tokens:
        if current and tok.start_ms - current[-1].end_ms > pause_threshold_ms:
            units.append(SpeechUnit(len(units), lecture_id, tuple(current)))
            current = []
        current.append(tok)
    if current:
        units.append(SpeechUnit(len(units), lecture_id, tuple(current)))
    return units


def generate_passages(
    units: list[SpeechUnit],
    n_max: int = DEFAULT_N_MAX,
    tokenizer: TokenizerConfig | None = None,
    first_passage_id: int = 0,
) -> list[Passage]:
    """Enumerate every window of 1..n_max consecutive units as a passage.

    Windows never cross lecture boundaries. For U units of one lecture the
    output holds sum_{w=1..min(n_max,U)} (U-w+1) passages. Term counts come
    from the tokenizer given at call time (whitespace, no-op config default).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    config = tokenizer if tokenizer is not None else TokenizerConfig()
    passages: list[Passage] = []
    pid = first_passage_id
    for lecture_units in _runs_by_lecture(units):
        unit_terms = [tokenize(u.text(), config) for u in lecture_units]
        u_count = len(lecture_units)
        for width in range(1, min(n_max, u_count) + 1):
            for start in range(0, u_count - width + 1):
                members = lecture_units[start : start + width]
                counts: Counter[str] = Counter()
                for terms in unit_terms[start : start + width]:
                    counts.update(terms)
                passages.append(
                    Passage(
                        passage_id=pid,
                        lecture_id=members[0].lecture_id,
                        unit_span=(members[0].unit_id, members[-1].unit_id + 1),
                        start_ms=members[0].start_ms,
                        end_ms=members[-1].end_ms,
                        term_counts=dict(counts),
                        dl=sum(counts.values()),
                    )
                )
                pid += 1
    return passages


def _runs_by_lecture(units: list[SpeechUnit]) -> list[list[SpeechUnit]]:
    runs: list[list[SpeechUnit]] = []
    for u in units:
        if runs and runs[-1][-1].lecture_id == u.lecture_id:
            runs[-1].append(u)
        else:
            runs.append([u])
    return runs


def format_unit_lines(units: list[SpeechUnit]) -> str:
    """Render units in the pre-segmented transcript format."""
    lines = [
        f"{u.unit_id}\t{u.start_ms}\t{u.end_ms}\t{u.text()}" for u in units
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def infer_lecture_id(path) -> str:
    """Lecture id for a transcript path.

    Inside a collection layout (`.../lectures/<id>/<variant>.tsv`) the id is
    the directory name; for standalone files it is the file stem.
    """
    from pathlib import Path

    p = Path(path)
    if p.parent.parent.name == "lectures":
        return p.parent.name
    return p.stem
