"""Tour of the HTTP API over an index built in a temporary directory.

Uses the in-process test client, so nothing binds a port; a real deployment
runs the same app via `lectern serve --index idx --collection col`.
Requires httpx (installed with the `test` extra).
"""

import tempfile
import warnings
from pathlib import Path

warnings.filterwarnings("ignore", message="Using `httpx`")
from fastapi.testclient import TestClient  # noqa: E402

from lectern.cli import main as lectern
from lectern.service import ServiceConfig, create_app
from lectern.synth import synthetic_collection


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        synth = synthetic_collection(
            n_lectures=2, units_per_lecture=64, queries_per_lecture=4, seed=29
        )
        synth.write(root / "col")
        unit_files = sorted((root / "col/lectures").glob("*/reference.tsv"))
        lectern(
            ["index"]
            + [arg for p in unit_files for arg in ("--units", str(p))]
            + ["--out", str(root / "idx")]
        )

        config = ServiceConfig(
            index_path=str(root / "idx"),
            units_paths=[str(p) for p in unit_files],
            textbook_dir=str(root / "col/textbooks"),
            media_base="https://media.example/lod",
        )
        client = TestClient(create_app(config))

        print("GET /health ->", client.get("/health").text)

        lectures = client.get("/lectures").json()["lectures"]
        print(f"GET /lectures -> {len(lectures)} lectures")
        for item in lectures:
            print(f"  {item['lecture_id']}: {item['n_units']} units, "
                  f"{item['end_ms'] / 60000:.1f} min")

        textbook = client.get("/lectures/lecture1/textbook").json()
        print(f"\nGET /lectures/lecture1/textbook -> "
              f"{len(textbook['paragraphs'])} paragraphs")
        paragraph = textbook["paragraphs"][0]
        print(f"  paragraph 0: {paragraph['text'][:70]}...")

        # Textbook-driven querying: paste a paragraph as the query.
        resp = client.post("/query", json={"text": paragraph["text"], "top_n": 3})
        groups = resp.json()["groups"]
        print(f"\nPOST /query (paragraph 0 as query) -> {len(groups)} groups")
        for g in groups:
            span = f"{g['start_ms'] / 1000:.0f}s..{g['end_ms'] / 1000:.0f}s"
            print(f"  #{g['rank']} {g['lecture_id']} {span:>12} "
                  f"score {g['score']:.2f}")
            print(f"      snippet: {g['snippet'][:60]}...")
            print(f"      media:   {g['media_url']}")

        units = client.get(
            "/lectures/lecture1/units", params={"from": 0, "to": 2}
        ).json()["units"]
        print(f"\nGET /lectures/lecture1/units?from=0&to=2 -> "
              f"{[u['unit_id'] for u in units]}")

        print("\nGET /lectures/nope/textbook ->",
              client.get("/lectures/nope/textbook").json())


if __name__ == "__main__":
    main()
