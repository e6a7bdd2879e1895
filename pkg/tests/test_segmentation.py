import pytest
from hypothesis import given, settings, strategies as st

from lectern.segmentation import (
    SpeechUnit,
    TimedToken,
    TranscriptError,
    format_unit_lines,
    generate_passages,
    parse_transcript,
    parse_unit_lines,
    parse_timed_tokens,
    segment_units,
)
from lectern.tokenizer import TokenizerConfig

from conftest import make_tokens, make_units


def brute_force_windows(n_units: int, n_max: int) -> list[tuple[int, int]]:
    """Every contiguous interval of width 1..n_max, enumerated directly."""
    return [
        (s, s + w)
        for w in range(1, min(n_max, n_units) + 1)
        for s in range(0, n_units - w + 1)
    ]


class TestParseTimedTokens:
    def test_empty_file(self):
        assert parse_timed_tokens("") == []

    def test_single_token(self):
        tokens = parse_timed_tokens("hello\t10\t250\n")
        assert tokens == [TimedToken("hello", 10, 250)]

    def test_end_before_start_names_line(self):
        with pytest.raises(TranscriptError, match="line 2"):
            parse_timed_tokens("a\t0\t100\nb\t300\t200\n")

    def test_malformed_line_names_line(self):
        with pytest.raises(TranscriptError, match="line 3"):
            parse_timed_tokens("a\t0\t100\nb\t200\t300\nbogus line\n")

    def test_non_integer_timestamp(self):
        with pytest.raises(TranscriptError, match="line 1"):
            parse_timed_tokens("a\tzero\t100\n")

    def test_overlapping_tokens_rejected(self):
        with pytest.raises(TranscriptError, match="out of order"):
            parse_timed_tokens("a\t0\t100\nb\t50\t200\n")

    def test_blank_lines_skipped(self):
        assert len(parse_timed_tokens("a\t0\t100\n\nb\t200\t300\n")) == 2

    def test_format_dispatch(self):
        assert parse_transcript("a\t0\t100\n", "timed") == [TimedToken("a", 0, 100)]
        with pytest.raises(ValueError, match="format"):
            parse_transcript("", "csv")


class TestParseUnitLines:
    def test_round_trip(self):
        units = make_units(["a b c", "d e"])
        text = format_unit_lines(units)
        parsed = parse_unit_lines(text, "lec")
        assert [u.text() for u in parsed] == ["a b c", "d e"]
        assert [u.unit_id for u in parsed] == [0, 1]
        assert [(u.start_ms, u.end_ms) for u in parsed] == [
            (u.start_ms, u.end_ms) for u in units
        ]

    def test_unit_ids_must_be_consecutive(self):
        with pytest.raises(TranscriptError, match="unit_id"):
            parse_unit_lines("1\t0\t100\ta b\n", "lec")

    def test_token_stamps_are_monotone(self):
        units = parse_unit_lines("0\t0\t1000\ta b c\n", "lec")
        tokens = units[0].tokens
        for prev, cur in zip(tokens, tokens[1:]):
            assert cur.start_ms >= prev.end_ms
        assert tokens[0].start_ms == 0
        assert tokens[-1].end_ms == 1000


class TestSegmentUnits:
    def test_spec_example_two_units(self):
        tokens = [
            TimedToken("t1", 0, 100),
            TimedToken("t2", 200, 300),
            TimedToken("t3", 1200, 1300),
        ]
        units = segment_units(tokens, 500)
        assert [[t.surface for t in u.tokens] for u in units] == [["t1", "t2"], ["t3"]]
        assert [u.unit_id for u in units] == [0, 1]
        assert units[0].start_ms == 0 and units[0].end_ms == 300

    def test_empty_input(self):
        assert segment_units([], 500) == []

    def test_all_gaps_below_threshold(self):
        tokens = make_tokens([(0, 100), (400, 100), (500, 100)])
        units = segment_units(tokens, 500)
        assert len(units) == 1
        assert len(units[0].tokens) == 3

    def test_gap_exactly_threshold_does_not_split(self):
        tokens = make_tokens([(0, 100), (500, 100)])
        assert len(segment_units(tokens, 500)) == 1

    def test_abutting_tokens_never_split(self):
        tokens = make_tokens([(0, 100), (0, 100), (0, 100)])
        assert len(segment_units(tokens, 1)) == 1

    def test_unsorted_rejected(self):
        tokens = [TimedToken("b", 500, 600), TimedToken("a", 0, 100)]
        with pytest.raises(TranscriptError):
            segment_units(tokens, 500)

    def test_nonpositive_threshold_rejected(self):
        with pytest.raises(ValueError):
            segment_units([], 0)

    @given(
        st.lists(
            st.tuples(st.integers(0, 2000), st.integers(0, 500)), max_size=40
        ),
        st.integers(1, 1500),
    )
    def test_round_trip_concatenation(self, layout, threshold):
        tokens = make_tokens(layout)
        units = segment_units(tokens, threshold)
        flattened = [t for u in units for t in u.tokens]
        assert flattened == tokens

    @given(
        st.lists(
            st.tuples(st.integers(0, 2000), st.integers(0, 500)), max_size=40
        ),
        st.integers(1, 1500),
        st.integers(1, 1500),
    )
    def test_threshold_monotonicity(self, layout, thr_a, thr_b):
        lo, hi = min(thr_a, thr_b), max(thr_a, thr_b)
        tokens = make_tokens(layout)
        assert len(segment_units(tokens, hi)) <= len(segment_units(tokens, lo))


class TestGeneratePassages:
    def test_five_units_fifteen_passages(self):
        units = make_units(["a", "b", "c", "d", "e"])
        passages = generate_passages(units, 5)
        assert len(passages) == 15
        assert len(passages) == len(brute_force_windows(5, 5))

    def test_single_unit(self):
        units = make_units(["hello world"])
        passages = generate_passages(units, 5)
        assert len(passages) == 1
        assert passages[0].unit_span == (0, 1)
        assert passages[0].term_counts == {"hello": 1, "world": 1}

    def test_three_units_nmax_five(self):
        units = make_units(["a", "b", "c"])
        assert len(generate_passages(units, 5)) == len(brute_force_windows(3, 5)) == 6

    def test_empty_units(self):
        assert generate_passages([], 5) == []

    def test_window_completeness_vs_brute_force(self, rng):
        for _ in range(30):
            n_units = int(rng.integers(0, 21))
            n_max = int(rng.integers(1, 8))
            units = make_units([f"w{i}" for i in range(n_units)])
            passages = generate_passages(units, n_max)
            got = sorted(p.unit_span for p in passages)
            assert got == sorted(brute_force_windows(n_units, n_max))

    @given(st.integers(0, 50), st.integers(1, 10))
    @settings(max_examples=60, deadline=None)
    def test_count_formula(self, n_units, n_max):
        units = make_units([f"w{i}" for i in range(n_units)])
        expected = sum(n_units - w + 1 for w in range(1, min(n_max, n_units) + 1))
        assert len(generate_passages(units, n_max)) == expected

    def test_term_counts_and_dl(self):
        units = make_units(["the cat", "cat sat"])
        passages = generate_passages(units, 2)
        wide = next(p for p in passages if p.width == 2)
        assert wide.term_counts == {"the": 1, "cat": 2, "sat": 1}
        assert wide.dl == 4
        assert wide.start_ms == units[0].start_ms
        assert wide.end_ms == units[1].end_ms

    def test_tokenizer_applied_at_call_time(self):
        units = make_units(["The CAT sat"])
        config = TokenizerConfig(lowercase=True, stopwords=frozenset({"the"}))
        (p,) = generate_passages(units, 1, tokenizer=config)
        assert p.term_counts == {"cat": 1, "sat": 1}
        assert p.dl == 2

    def test_windows_never_cross_lectures(self):
        a = make_units(["x y", "y z"], lecture_id="lecA")
        b = make_units(["p q"], lecture_id="lecB")
        passages = generate_passages(a + b, 5)
        assert len(passages) == 3 + 1
        assert all(
            p.lecture_id in ("lecA", "lecB") for p in passages
        )
        spans_b = [p.unit_span for p in passages if p.lecture_id == "lecB"]
        assert spans_b == [(0, 1)]

    def test_passage_ids_sequential_and_unique(self):
        units = make_units(["a", "b", "c"])
        passages = generate_passages(units, 3, first_passage_id=10)
        assert [p.passage_id for p in passages] == list(range(10, 16))

    def test_invalid_n_max(self):
        with pytest.raises(ValueError):
            generate_passages([], 0)
