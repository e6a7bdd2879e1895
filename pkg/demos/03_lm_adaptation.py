"""Topic adaptation by corpus selection, measured with OOV rate and perplexity.

A textbook about topic A is the query against a mixed general corpus; the
top-ranked documents form the training set for a trigram model. Against a
model trained on an equal token budget of unselected documents, the adapted
model should fit held-out topic-A text better (lower perplexity), which is
the direction that made the recognizer better in the original experiments.
"""

from lectern.lm import (
    build_vocab,
    oov_rate,
    perplexity,
    select_corpus,
    train_trigram,
    truncate_to_budget,
)
from lectern.synth import two_topic_corpus

TOKEN_BUDGET = 2000
SELECT_K = 60


def main() -> None:
    corpus = two_topic_corpus(seed=11)
    n_a = sum(1 for t in corpus.topic_of.values() if t == "A")
    print(f"general corpus: {len(corpus.general)} documents "
          f"({n_a} topic A, {len(corpus.general) - n_a} topic B)")

    selected = select_corpus(corpus.general, corpus.textbook, k=SELECT_K)
    picked_a = sum(1 for d in selected if corpus.topic_of[d.doc_id] == "A")
    print(f"textbook-driven selection: top {SELECT_K} documents, "
          f"{picked_a} of them topic A ({picked_a / SELECT_K:.0%})")

    matched = truncate_to_budget(selected, TOKEN_BUDGET)
    mixed = truncate_to_budget(corpus.general, TOKEN_BUDGET)
    vocab = build_vocab(corpus.general, cap=20_000)
    print(f"training budget {TOKEN_BUDGET} tokens each, shared vocabulary "
          f"of {vocab.size} terms")

    model_matched = train_trigram(matched, vocab)
    model_mixed = train_trigram(mixed, vocab)

    test = corpus.test_tokens
    print(f"\nheld-out topic-A text: {len(test)} tokens, "
          f"OOV rate {oov_rate(vocab, test):.3f}")
    pp_matched = perplexity(model_matched, test)
    pp_mixed = perplexity(model_mixed, test)
    print(f"perplexity, topic-matched training : {pp_matched:7.1f}")
    print(f"perplexity, mixed training         : {pp_mixed:7.1f}")
    gain = (pp_mixed - pp_matched) / pp_mixed
    print(f"adaptation reduces perplexity by {gain:.0%}")


if __name__ == "__main__":
    main()
