"""Retrieval robustness to recognition errors, without a recognizer.

Controlled word errors (substitutions, deletions, insertions) are injected
into clean transcripts at target error rates; the index is rebuilt and both
query styles are re-evaluated. Long paragraph-style queries keep most of
their matching terms even at 40% word error rate, so their F-measure decays
far more gently than 2-keyword queries.
"""

from lectern.noise import wer_sweep
from lectern.synth import synthetic_collection


def main() -> None:
    synth = synthetic_collection(
        n_lectures=5, units_per_lecture=200, queries_per_lecture=8, seed=7
    )
    collection = synth.collection
    print(f"collection: {len(collection.lectures)} lectures x "
          f"{len(collection.lectures['lecture1']['reference'])} units, "
          f"{len(synth.long_queries)} paragraph and "
          f"{len(synth.short_queries)} keyword queries")

    report = wer_sweep(
        collection,
        wer_targets=[0.0, 0.2, 0.4, 0.6],
        query_sets={
            "paragraph": synth.long_queries,
            "keyword": synth.short_queries,
        },
        seed=0,
        n_seeds=5,
    )
    print("\nmean F over queries and seeds (ratio to clean in parentheses):\n")
    print(report.render_table())
    p = report.cells[("paragraph", 0.4)]
    k = report.cells[("keyword", 0.4)]
    print(f"at 40% WER, paragraph queries keep {p.f_ratio:.0%} of their clean F,"
          f" keyword queries only {k.f_ratio:.0%}:")
    print("longer queries are the more robust way to search noisy transcripts.")


if __name__ == "__main__":
    main()
