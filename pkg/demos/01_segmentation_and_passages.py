"""Walk through transcript parsing, pause segmentation, and passage windows.

A timed transcript is one token per line (surface, start_ms, end_ms). Pauses
longer than a threshold split the token stream into speech units; windows of
1..n_max consecutive units become the passages that get indexed.
"""

from lectern.segmentation import (
    generate_passages,
    parse_timed_tokens,
    segment_units,
)

TRANSCRIPT = """\
today\t0\t420
we\t480\t600
discuss\t640\t1100
discriminant\t1160\t1900
analysis\t1950\t2500
first\t3400\t3800
some\t3850\t4050
history\t4100\t4700
the\t6200\t6350
method\t6400\t6900
goes\t6950\t7200
back\t7250\t7600
decades\t7650\t8300
"""


def main() -> None:
    tokens = parse_timed_tokens(TRANSCRIPT)
    print(f"parsed {len(tokens)} timed tokens "
          f"({tokens[0].start_ms}ms .. {tokens[-1].end_ms}ms)")

    # The pause threshold controls granularity: lower thresholds cut more.
    for threshold in (400, 1200, 2000):
        units = segment_units(tokens, pause_threshold_ms=threshold)
        print(f"\npause threshold {threshold}ms -> {len(units)} units")
        for u in units:
            print(f"  unit {u.unit_id}: [{u.start_ms:>5}..{u.end_ms:>5}] {u.text()}")

    units = segment_units(tokens, pause_threshold_ms=800)
    passages = generate_passages(units, n_max=3)
    print(f"\nwindows of 1..3 units over {len(units)} units "
          f"-> {len(passages)} passages")
    for p in passages:
        span = f"[{p.unit_span[0]},{p.unit_span[1]})"
        print(f"  passage {p.passage_id}: units {span:>6} width {p.width} "
              f"dl={p.dl}")

    widest = max(passages, key=lambda p: p.width)
    print(f"\nterm counts of the widest passage: {widest.term_counts}")


if __name__ == "__main__":
    main()
