"""Lecture passage retrieval: segmentation, indexing, LM adaptation, evaluation."""

from .segmentation import (
    TimedToken,
    SpeechUnit,
    Passage,
    TranscriptError,
    parse_transcript,
    segment_units,
    generate_passages,
)
from .tokenizer import TokenizerConfig, tokenize
from .retrieval import (
    ScoringParams,
    InvertedIndex,
    Query,
    ScoredPassage,
    PassageGroup,
    build_index,
    score_passage,
    search,
    merge_overlaps,
    query_top_n,
    save_index,
    load_index,
)
from .lm import (
    Document,
    Vocabulary,
    TrigramModel,
    select_corpus,
    build_vocab,
    train_trigram,
    oov_rate,
    perplexity,
)
from .evaluation import (
    Qrels,
    TestCollection,
    EvalReport,
    word_error_rate,
    recall_precision_f,
    run_benchmark,
)
from .noise import NoiseSpec, corrupt_transcript, wer_sweep

__version__ = "0.1.0"

__all__ = [
    "TimedToken",
    "SpeechUnit",
    "Passage",
    "TranscriptError",
    "parse_transcript",
    "segment_units",
    "generate_passages",
    "TokenizerConfig",
    "tokenize",
    "ScoringParams",
    "InvertedIndex",
    "Query",
    "ScoredPassage",
    "PassageGroup",
    "build_index",
    "score_passage",
    "search",
    "merge_overlaps",
    "query_top_n",
    "save_index",
    "load_index",
    "Document",
    "Vocabulary",
    "TrigramModel",
    "select_corpus",
    "build_vocab",
    "train_trigram",
    "oov_rate",
    "perplexity",
    "Qrels",
    "TestCollection",
    "EvalReport",
    "word_error_rate",
    "recall_precision_f",
    "run_benchmark",
    "NoiseSpec",
    "corrupt_transcript",
    "wer_sweep",
]
