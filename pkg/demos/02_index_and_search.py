"""Index a synthetic lecture and compare keyword vs paragraph queries.

Shows the probabilistic scoring in action and why temporally overlapping
results are merged: neighboring windows around a relevant region all score
high, and grouping collapses them into one time span with the mean score.
"""

from lectern.retrieval import build_index, merge_overlaps, query_top_n, search
from lectern.segmentation import generate_passages
from lectern.synth import synthetic_collection


def main() -> None:
    synth = synthetic_collection(
        n_lectures=1, units_per_lecture=64, queries_per_lecture=4, seed=17
    )
    collection = synth.collection
    units = collection.lectures["lecture1"]["reference"]
    passages = generate_passages(units, n_max=5)
    index = build_index(passages)
    print(f"indexed {index.corpus_size} passages over {len(units)} units, "
          f"avgdl {index.avgdl:.1f}")

    qid, paragraph = next(iter(synth.long_queries.items()))
    keyword_text = synth.short_queries[qid.replace("-p", "-k")]
    relevant = sorted(u for _, u in collection.qrels.for_query(qid))
    print(f"\nquery region: relevant units {relevant}")

    for label, text in (("keyword", keyword_text), ("paragraph", paragraph)):
        print(f"\n--- {label} query: {text[:70]}{'...' if len(text) > 70 else ''}")
        ranked = search(index, index.make_query(text), pool_size=50)
        print(f"  {len(ranked)} passages in the candidate pool; top 5 raw:")
        for sp in ranked[:5]:
            print(f"    passage {sp.passage_id:>4} units "
                  f"[{sp.unit_span[0]},{sp.unit_span[1]}) score {sp.score:.3f}")
        groups = merge_overlaps(ranked)[:3]
        print(f"  merged into {len(groups)} top groups:")
        for rank, g in enumerate(groups, 1):
            print(f"    #{rank} units [{g.unit_span[0]},{g.unit_span[1]}) "
                  f"{g.start_ms / 1000:.1f}s..{g.end_ms / 1000:.1f}s "
                  f"mean score {g.score:.3f} ({len(g.members)} members)")

    # query_top_n is exactly search + merge + truncate.
    assert query_top_n(index, paragraph, 3) == merge_overlaps(
        search(index, index.make_query(paragraph), 50)
    )[:3]
    print("\nquery_top_n == search -> merge_overlaps -> truncate")


if __name__ == "__main__":
    main()
