"""End-to-end benchmark table: clean, degraded, and adapted conditions.

The report mirrors the classic layout: per lecture and condition, OOV/PP/WER
on top, then recall/precision/F at result depths 1..3 averaged over the
lecture's paragraph queries.

Without a speech recognizer, language-model adaptation is emulated at the
transcript level: the unadapted condition injects 40% word errors, the
adapted one 30% (LM adaptation cut WER by roughly a quarter in the original
experiments). Each condition carries a language model for its OOV/PP
columns; the vocabulary is held fixed so the perplexities are comparable,
and the adapted model simply trains on all of the textbook text instead of
half of it. Perplexity comparisons across different vocabularies are not
meaningful (a model with more OOV scores more tokens as unk).
"""

from lectern.evaluation import (
    EvalCondition,
    Qrels,
    TestCollection,
    lecture_tokens,
    run_benchmark,
)
from lectern.lm import Document, build_vocab, train_trigram
from lectern.noise import NoiseSpec, corrupt_transcript, rates_for_target
from lectern.synth import synthetic_collection


def degraded_variant(reference, target_wer, confusion, seed):
    sub, dele, ins = rates_for_target(target_wer)
    return corrupt_transcript(
        reference, NoiseSpec(sub, dele, ins, seed=seed, confusion_vocab=confusion)
    )


def textbook_lm(textbooks, vocab, half_only: bool):
    docs = []
    for lecture_id, paragraphs in textbooks.items():
        kept = paragraphs[::2] if half_only else paragraphs
        docs.append(Document(lecture_id, "\n".join(kept)))
    return train_trigram(docs, vocab)


def main() -> None:
    synth = synthetic_collection(
        n_lectures=3, units_per_lecture=120, queries_per_lecture=6, seed=23
    )
    base = synth.collection
    queries = dict(synth.long_queries)  # textbook paragraphs as queries
    qrels = Qrels({q: base.qrels.relevant[q] for q in queries})

    confusion = tuple(
        sorted(
            {
                t
                for variants in base.lectures.values()
                for t in lecture_tokens(variants["reference"])
            }
        )
    )
    lectures = {}
    for lec, variants in base.lectures.items():
        ref = variants["reference"]
        lectures[lec] = {
            "reference": ref,
            "asr40": degraded_variant(ref, 0.40, confusion, seed=40),
            "adapted30": degraded_variant(ref, 0.30, confusion, seed=30),
        }
    collection = TestCollection(lectures, queries, qrels, base.textbooks)

    vocab = build_vocab(
        [Document(lec, "\n".join(ps)) for lec, ps in base.textbooks.items()],
        cap=20_000,
    )
    conditions = [
        EvalCondition("HUM", "reference"),
        EvalCondition("ASR", "asr40", lm=textbook_lm(base.textbooks, vocab, True)),
        EvalCondition("+LA", "adapted30", lm=textbook_lm(base.textbooks, vocab, False)),
    ]
    report = run_benchmark(collection, conditions, top_ns=[1, 2, 3])
    print(report.render_table())
    print("reading the table: recall rises with depth while precision falls;")
    print("the adapted condition recovers part of the degraded condition's")
    print("loss, and its fuller LM shows lower OOV and perplexity.")


if __name__ == "__main__":
    main()
