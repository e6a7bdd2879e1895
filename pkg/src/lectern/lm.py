"""Topic-adapted trigram language modeling.

A topic-specific subcorpus is selected from a general document collection by
ranking whole documents against a textbook query (same scoring as passage
retrieval), then a vocabulary-truncated trigram model with Witten-Bell
backoff is trained on it. OOV rate and perplexity quantify how well the
model fits held-out transcriptions.

Smoothing (per conditioning context h with total count c(h) and T(h)
distinct observed successors):

    p(w|h) = c(h,w) / (c(h) + T(h))                   if c(h,w) > 0
           = beta(h) * p'(w) / D(h)                   otherwise

where beta(h) = T(h)/(c(h)+T(h)) is the reserved mass, p' the next-lower
order and D(h) the total lower-order mass of unseen successors, so every
context distribution sums to exactly 1. Unseen contexts fall through to the
lower order; the base distribution is uniform over vocab + {unk, eos}.
Sentences (document lines) are padded with two start markers and one end
marker; the end marker is a predicted event, start markers are context only.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .retrieval import ScoringParams, _idf, _term_score
from .segmentation import Passage
from .tokenizer import TokenizerConfig, tokenize

DEFAULT_SELECT_K = 2000
DEFAULT_VOCAB_CAP = 20000

START = "<s>"
EOS = "</s>"
UNK = "<unk>"
_RESERVED = {START, EOS, UNK}

MODEL_FORMAT = "lectern-trigram"
MODEL_VERSION = 1


class ModelError(ValueError):
    """Invalid training input or model file."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    body: str


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    unk_symbol: str = UNK
    _members: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        members = frozenset(self.terms)
        if self.unk_symbol in members:
            raise ModelError("unk symbol must not be a vocabulary term")
        object.__setattr__(self, "_members", members)

    @property
    def size(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._members


def score_documents(
    general: list[Document],
    query_text: str,
    params: ScoringParams | None = None,
    tokenizer: TokenizerConfig | None = None,
) -> list[tuple[Document, float]]:
    """Score every document against the query, documents as one-passage units.

    Returns all documents ordered by score descending; ties keep corpus
    order, so any top-k listing is a prefix of every larger one.
    """
    from .retrieval import build_index

    tokenizer = tokenizer if tokenizer is not None else TokenizerConfig()
    passages = []
    for i, doc in enumerate(general):
        counts = Counter(tokenize(doc.body, tokenizer))
        passages.append(
            Passage(
                passage_id=i,
                lecture_id=doc.doc_id,
                unit_span=(0, 1),
                start_ms=0,
                end_ms=0,
                term_counts=dict(counts),
                dl=sum(counts.values()),
            )
        )
    index = build_index(passages, params, tokenizer)
    query = index.make_query(query_text)
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
    order = sorted(range(len(general)), key=lambda i: (-accum.get(i, 0.0), i))
    return [(general[i], accum.get(i, 0.0)) for i in order]


def select_corpus(
    general: list[Document],
    textbook: str,
    k: int = DEFAULT_SELECT_K,
    index_params: ScoringParams | None = None,
    tokenizer: TokenizerConfig | None = None,
) -> list[Document]:
    """Pick the k documents most relevant to the textbook text."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = score_documents(general, textbook, index_params, tokenizer)
    return [doc for doc, _ in ranked[:k]]


def truncate_to_budget(docs: list[Document], token_budget: int) -> list[Document]:
    """Clip a document list to a total whitespace-token budget, in order.

    Line (sentence) boundaries inside documents are preserved.
    """
    out: list[Document] = []
    total = 0
    for doc in docs:
        if total >= token_budget:
            break
        kept_lines: list[str] = []
        for line in doc.body.splitlines() or [doc.body]:
            tokens = line.split()
            room = token_budget - total
            if room <= 0:
                break
            if len(tokens) > room:
                tokens = tokens[:room]
            if tokens:
                kept_lines.append(" ".join(tokens))
            total += len(tokens)
        if kept_lines:
            out.append(Document(doc.doc_id, "\n".join(kept_lines)))
    return out


def build_vocab(
    corpus: list[Document],
    cap: int = DEFAULT_VOCAB_CAP,
    tokenizer: TokenizerConfig | None = None,
) -> Vocabulary:
    """Keep the cap most frequent terms; ties break lexicographically."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    tokenizer = tokenizer if tokenizer is not None else TokenizerConfig()
    counts: Counter[str] = Counter()
    for doc in corpus:
        for term in tokenize(doc.body, tokenizer):
            if term not in _RESERVED:
                counts[term] += 1
    ordered = sorted(counts.items(), key=lambda it: (-it[1], it[0]))
    return Vocabulary(tuple(term for term, _ in ordered[:cap]))


class TrigramModel:
    """Vocabulary-truncated backoff trigram model.

    The outcome alphabet is the vocabulary plus the unk and end-of-sentence
    symbols; conditional distributions over it sum to 1 for every context.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        tri: dict[tuple[str, str, str], int],
        bi: dict[tuple[str, str], int],
        uni: dict[str, int],
        smoothing: str = "witten-bell",
    ) -> None:
        self.vocab = vocab
        self.smoothing = smoothing
        self.tri = tri
        self.bi = bi
        self.uni = uni
        self._outcomes = tuple(vocab.terms) + (vocab.unk_symbol, EOS)
        self._base = 1.0 / len(self._outcomes)
        # Context totals and observed successors per level.
        self._tri_total: Counter[tuple[str, str]] = Counter()
        self._tri_succ: dict[tuple[str, str], list[str]] = {}
        for (u, v, w), c in tri.items():
            self._tri_total[(u, v)] += c
            self._tri_succ.setdefault((u, v), []).append(w)
        self._bi_total: Counter[str] = Counter()
        self._bi_succ: dict[str, list[str]] = {}
        for (v, w), c in bi.items():
            self._bi_total[v] += c
            self._bi_succ.setdefault(v, []).append(w)
        self._n_events = sum(uni.values())
        self._uni_types = len(uni)
        # Unseen-successor mass caches, filled lazily.
        self._d_uni: float | None = None
        self._d_bi: dict[str, float] = {}
        self._d_tri: dict[tuple[str, str], float] = {}

    @classmethod
    def uniform(cls, vocab: Vocabulary) -> "TrigramModel":
        """Reference model assigning 1/V to every token, for PP baselines."""
        return cls(vocab, {}, {}, {}, smoothing="uniform")

    def outcomes(self) -> tuple[str, ...]:
        if self.smoothing == "uniform":
            return tuple(self.vocab.terms)
        return self._outcomes

    def _map(self, token: str) -> str:
        if token in self.vocab or token in (EOS, self.vocab.unk_symbol):
            return token
        return self.vocab.unk_symbol

    def _map_context(self, token: str) -> str:
        if token == START:
            return token
        return self._map(token)

    def _p_uni(self, w: str) -> float:
        c = self.uni.get(w, 0)
        n, t = self._n_events, self._uni_types
        if t == len(self._outcomes):
            return c / n
        if c > 0:
            return c / (n + t)
        if self._d_uni is None:
            # Unseen outcomes carry uniform base mass.
            self._d_uni = (len(self._outcomes) - t) * self._base
        beta = t / (n + t)
        return beta * self._base / self._d_uni

    def _p_bi(self, w: str, v: str) -> float:
        total = self._bi_total.get(v, 0)
        if total == 0:
            return self._p_uni(w)
        succ = self._bi_succ[v]
        t = len(succ)
        c = self.bi.get((v, w), 0)
        if t == len(self._outcomes):
            return c / total
        if c > 0:
            return c / (total + t)
        d = self._d_bi.get(v)
        if d is None:
            d = max(1.0 - sum(self._p_uni(x) for x in succ), 1e-300)
            self._d_bi[v] = d
        beta = t / (total + t)
        return beta * self._p_uni(w) / d

    def _p_tri(self, w: str, u: str, v: str) -> float:
        total = self._tri_total.get((u, v), 0)
        if total == 0:
            return self._p_bi(w, v)
        succ = self._tri_succ[(u, v)]
        t = len(succ)
        c = self.tri.get((u, v, w), 0)
        if t == len(self._outcomes):
            return c / total
        if c > 0:
            return c / (total + t)
        d = self._d_tri.get((u, v))
        if d is None:
            d = max(1.0 - sum(self._p_bi(x, v) for x in succ), 1e-300)
            self._d_tri[(u, v)] = d
        beta = t / (total + t)
        return beta * self._p_bi(w, v) / d

    def prob(self, word: str, context: tuple[str, str]) -> float:
        """Smoothed p(word | context); OOV word and context map to unk."""
        if self.smoothing == "uniform":
            return 1.0 / self.vocab.size
        w = self._map(word)
        u, v = (self._map_context(x) for x in context)
        return self._p_tri(w, u, v)


def train_trigram(
    corpus: list[Document],
    vocab: Vocabulary,
    tokenizer: TokenizerConfig | None = None,
) -> TrigramModel:
    """Count padded sentence n-grams with OOV tokens mapped to unk."""
    if not corpus:
        raise ModelError("cannot train on an empty corpus")
    tokenizer = tokenizer if tokenizer is not None else TokenizerConfig()
    tri: dict[tuple[str, str, str], int] = {}
    bi: dict[tuple[str, str], int] = {}
    uni: dict[str, int] = {}
    n_sentences = 0
    for doc in corpus:
        for line in doc.body.splitlines():
            tokens = tokenize(line, tokenizer)
            if not tokens:
                continue
            n_sentences += 1
            events = [t if t in vocab else vocab.unk_symbol for t in tokens]
            events.append(EOS)
            u, v = START, START
            for w in events:
                tri[(u, v, w)] = tri.get((u, v, w), 0) + 1
                bi[(v, w)] = bi.get((v, w), 0) + 1
                uni[w] = uni.get(w, 0) + 1
                u, v = v, w
    if n_sentences == 0:
        raise ModelError("cannot train on an empty corpus")
    return TrigramModel(vocab, tri, bi, uni)


def oov_rate(vocab: Vocabulary, test_tokens: list[str]) -> float:
    """Fraction of test tokens missing from the vocabulary."""
    if not test_tokens:
        raise ModelError("empty test set")
    misses = sum(1 for t in test_tokens if t not in vocab)
    return misses / len(test_tokens)


def perplexity(model: TrigramModel, test_tokens: list[str]) -> float:
    """exp of the negative mean log probability over the test tokens.

    OOV tokens are scored (and counted) as unk; the context starts at two
    start markers and is never reset. No end-of-sentence event is scored.
    """
    if not test_tokens:
        raise ModelError("empty test set")
    log_sum = 0.0
    u, v = START, START
    for token in test_tokens:
        p = model.prob(token, (u, v))
        if p <= 0.0:
            raise ModelError(f"zero probability for token {token!r}")
        log_sum += math.log(p)
        u, v = v, token
    return math.exp(-log_sum / len(test_tokens))


def save_model(model: TrigramModel, path: str | os.PathLike) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "smoothing": model.smoothing,
        "vocab": {"terms": list(model.vocab.terms), "unk": model.vocab.unk_symbol},
        "trigrams": [[u, v, w, c] for (u, v, w), c in model.tri.items()],
        "bigrams": [[v, w, c] for (v, w), c in model.bi.items()],
        "unigrams": [[w, c] for w, c in model.uni.items()],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)


def load_model(path: str | os.PathLike) -> TrigramModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelError(f"{path} is not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise ModelError(f"unsupported model version {doc.get('version')}")
    try:
        vocab = Vocabulary(tuple(doc["vocab"]["terms"]), doc["vocab"]["unk"])
        tri = {(u, v, w): int(c) for u, v, w, c in doc["trigrams"]}
        bi = {(v, w): int(c) for v, w, c in doc["bigrams"]}
        uni = {w: int(c) for w, c in doc["unigrams"]}
        return TrigramModel(vocab, tri, bi, uni, smoothing=doc["smoothing"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"model file {path} is corrupt: {exc}") from None


def load_corpus(path: str | os.PathLike) -> list[Document]:
    """Read a corpus directory (one UTF-8 file per document) or TSV file."""
    p = Path(path)
    if p.is_dir():
        docs = []
        for f in sorted(p.iterdir()):
            if f.is_file():
                docs.append(Document(f.stem, f.read_text(encoding="utf-8")))
        return docs
    docs = []
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ModelError(f"{p}: line {lineno}: expected doc_id<TAB>body")
        doc_id, body = line.split("\t", 1)
        docs.append(Document(doc_id, body))
    return docs
