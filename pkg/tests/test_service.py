import pytest
from fastapi.testclient import TestClient

from lectern.retrieval import (
    build_index,
    format_groups_tsv,
    load_index,
    query_top_n,
    save_index,
)
from lectern.segmentation import generate_passages
from lectern.service import IndexLoadError, LectureStore, ServiceConfig, create_app
from lectern.synth import synthetic_collection


@pytest.fixture(scope="module")
def deployment(tmp_path_factory):
    root = tmp_path_factory.mktemp("svc")
    synth = synthetic_collection(
        n_lectures=2, units_per_lecture=48, queries_per_lecture=3, seed=13
    )
    synth.write(root / "col")
    passages = []
    for lec in sorted(synth.collection.lectures):
        units = synth.collection.lectures[lec]["reference"]
        passages.extend(generate_passages(units, 5, first_passage_id=len(passages)))
    index = build_index(passages)
    save_index(index, root / "idx")
    config = ServiceConfig(
        index_path=str(root / "idx"),
        units_paths=[
            str(root / "col/lectures/lecture1/reference.tsv"),
            str(root / "col/lectures/lecture2/reference.tsv"),
        ],
        textbook_dir=str(root / "col/textbooks"),
        media_base="https://media.example/lectures",
    )
    return TestClient(create_app(config)), root, synth


class TestHealthAndLectures:
    def test_health(self, deployment):
        client, _, _ = deployment
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.text == "ok"

    def test_lectures_listing(self, deployment):
        client, _, _ = deployment
        resp = client.get("/lectures")
        assert resp.status_code == 200
        items = resp.json()["lectures"]
        assert [it["lecture_id"] for it in items] == ["lecture1", "lecture2"]
        assert all(it["n_units"] == 48 and it["has_textbook"] for it in items)

    def test_unknown_lecture_404_with_error_shape(self, deployment):
        client, _, _ = deployment
        resp = client.get("/lectures/unknown-id/textbook")
        assert resp.status_code == 404
        body = resp.json()
        assert body["code"] == 404 and "unknown-id" in body["message"]


class TestTextbookAndUnits:
    def test_textbook_paragraphs_with_stable_ids(self, deployment):
        client, _, synth = deployment
        resp = client.get("/lectures/lecture1/textbook")
        paragraphs = resp.json()["paragraphs"]
        assert [p["paragraph_id"] for p in paragraphs] == list(range(len(paragraphs)))
        assert [p["text"] for p in paragraphs] == synth.collection.textbooks["lecture1"]

    def test_units_range(self, deployment):
        client, _, synth = deployment
        resp = client.get("/lectures/lecture2/units", params={"from": 3, "to": 6})
        units = resp.json()["units"]
        assert [u["unit_id"] for u in units] == [3, 4, 5]
        want = synth.collection.lectures["lecture2"]["reference"][3]
        assert units[0]["text"] == want.text()
        assert units[0]["start_ms"] == want.start_ms

    def test_units_default_full_range(self, deployment):
        client, _, _ = deployment
        units = client.get("/lectures/lecture1/units").json()["units"]
        assert len(units) == 48


class TestQueryEndpoint:
    def test_json_groups_in_rank_order(self, deployment):
        client, _, synth = deployment
        text = next(iter(synth.long_queries.values()))
        resp = client.post("/query", json={"text": text, "top_n": 3})
        assert resp.status_code == 200
        groups = resp.json()["groups"]
        assert [g["rank"] for g in groups] == list(range(1, len(groups) + 1))
        scores = [g["score"] for g in groups]
        assert scores == sorted(scores, reverse=True)
        assert all(g["snippet"] for g in groups)
        assert all(
            g["media_url"].startswith("https://media.example/lectures/")
            for g in groups
        )
        assert all(isinstance(g["unit_ids"], list) for g in groups)

    def test_lecture_filter(self, deployment):
        client, _, synth = deployment
        text = next(iter(synth.long_queries.values()))
        resp = client.post("/query", json={"text": text, "lecture": "lecture2"})
        assert all(g["lecture_id"] == "lecture2" for g in resp.json()["groups"])

    def test_tsv_format_parity_with_cli_output(self, deployment):
        client, root, synth = deployment
        index = load_index(root / "idx")
        for text in list(synth.long_queries.values())[:3]:
            resp = client.post("/query", json={"text": text, "top_n": 3, "format": "tsv"})
            assert resp.text == format_groups_tsv(query_top_n(index, text, 3, 50))

    def test_no_match_returns_empty(self, deployment):
        client, _, _ = deployment
        resp = client.post("/query", json={"text": "zz-unknown-term"})
        assert resp.json()["groups"] == []

    def test_repeated_requests_identical(self, deployment):
        client, _, synth = deployment
        text = next(iter(synth.short_queries.values()))
        a = client.post("/query", json={"text": text}).content
        b = client.post("/query", json={"text": text}).content
        assert a == b

    def test_bad_params_rejected(self, deployment):
        client, _, _ = deployment
        assert client.post("/query", json={"text": "x", "top_n": 0}).status_code == 400
        assert client.post("/query", json={"text": "x", "format": "xml"}).status_code == 400


class TestStartup:
    def test_bad_index_refuses_to_start(self, tmp_path):
        bad = tmp_path / "broken"
        bad.write_text("not an index")
        with pytest.raises(IndexLoadError):
            create_app(ServiceConfig(index_path=str(bad)))

    def test_missing_index_refuses_to_start(self, tmp_path):
        with pytest.raises(IndexLoadError):
            create_app(ServiceConfig(index_path=str(tmp_path / "absent")))

    def test_static_dir_mounted(self, deployment, tmp_path):
        _, root, _ = deployment
        static = tmp_path / "dist"
        static.mkdir()
        (static / "index.html").write_text("<html><body>ui</body></html>")
        config = ServiceConfig(index_path=str(root / "idx"), static_dir=str(static))
        client = TestClient(create_app(config))
        resp = client.get("/")
        assert resp.status_code == 200
        assert "ui" in resp.text
