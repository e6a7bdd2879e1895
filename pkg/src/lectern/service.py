"""Read-only HTTP facade over a prebuilt index and its source materials.

The service never builds anything: the index and transcripts are produced
off-line and loaded once at startup, after which every endpoint reads shared
immutable state. Query results are byte-identical to the command-line
`query` output when requested in machine (tsv) format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query as QueryParam, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .evaluation import split_paragraphs
from .retrieval import (
    DEFAULT_POOL_SIZE,
    IndexLoadError,
    InvertedIndex,
    PassageGroup,
    format_groups_tsv,
    load_index,
    merge_overlaps,
    search,
)
from .segmentation import SpeechUnit, infer_lecture_id, parse_unit_lines

DEFAULT_TOP_N = 3


@dataclass
class ServiceConfig:
    index_path: str
    units_paths: list[str] = field(default_factory=list)  # one lecture per file
    textbook_dir: str | None = None
    media_base: str | None = None  # playback link template base
    default_top_n: int = DEFAULT_TOP_N
    default_pool_size: int = DEFAULT_POOL_SIZE
    static_dir: str | None = None  # optional built web UI
    host: str = "127.0.0.1"
    port: int = 8000


class QueryRequest(BaseModel):
    text: str
    top_n: int | None = None
    pool_size: int | None = None
    lecture: str | None = None
    format: str = "json"  # "json" or "tsv"


@dataclass
class LectureStore:
    units: dict[str, list[SpeechUnit]]
    textbooks: dict[str, list[str]]

    @classmethod
    def load(cls, config: ServiceConfig) -> "LectureStore":
        units: dict[str, list[SpeechUnit]] = {}
        for path in config.units_paths:
            p = Path(path)
            lecture_id = infer_lecture_id(p)
            units[lecture_id] = parse_unit_lines(
                p.read_text(encoding="utf-8"), lecture_id
            )
        textbooks: dict[str, list[str]] = {}
        if config.textbook_dir:
            for f in sorted(Path(config.textbook_dir).glob("*.txt")):
                textbooks[f.stem] = split_paragraphs(f.read_text(encoding="utf-8"))
        return cls(units, textbooks)

    def snippet(self, lecture_id: str, unit_span: tuple[int, int], limit: int = 240) -> str:
        units = self.units.get(lecture_id)
        if not units:
            return ""
        text = " ".join(
            units[u].text() for u in range(*unit_span) if 0 <= u < len(units)
        )
        return text[:limit]


def query_groups(
    index: InvertedIndex,
    text: str,
    top_n: int,
    pool_size: int,
    lecture: str | None = None,
) -> list[PassageGroup]:
    """search -> optional lecture filter -> merge -> truncate."""
    ranked = search(index, index.make_query(text), pool_size)
    if lecture is not None:
        ranked = [sp for sp in ranked if sp.lecture_id == lecture]
    return merge_overlaps(ranked)[:top_n]


def groups_to_payload(
    groups: list[PassageGroup], store: LectureStore, media_base: str | None
) -> list[dict]:
    payload = []
    for rank, g in enumerate(groups, start=1):
        item = {
            "rank": rank,
            "score": g.score,
            "lecture_id": g.lecture_id,
            "start_ms": g.start_ms,
            "end_ms": g.end_ms,
            "unit_ids": list(g.unit_ids()),
            "snippet": store.snippet(g.lecture_id, g.unit_span),
        }
        if media_base:
            item["media_url"] = (
                f"{media_base.rstrip('/')}/{g.lecture_id}?t={g.start_ms // 1000}"
            )
        payload.append(item)
    return payload


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the application; fails fast if the index cannot be loaded."""
    index = load_index(config.index_path)
    store = LectureStore.load(config)
    app = FastAPI(title="lectern", docs_url=None, redoc_url=None)

    @app.exception_handler(HTTPException)
    async def http_error(_: Request, exc: HTTPException) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": exc.status_code, "message": exc.detail},
        )

    @app.get("/health", response_class=PlainTextResponse)
    def health() -> str:
        return "ok"

    @app.get("/lectures")
    def lectures() -> dict:
        items = []
        for lecture_id, units in sorted(store.units.items()):
            items.append(
                {
                    "lecture_id": lecture_id,
                    "n_units": len(units),
                    "start_ms": units[0].start_ms if units else 0,
                    "end_ms": units[-1].end_ms if units else 0,
                    "has_textbook": lecture_id in store.textbooks,
                }
            )
        return {"lectures": items}

    def _require_lecture(lecture_id: str) -> None:
        if lecture_id not in store.units and lecture_id not in store.textbooks:
            raise HTTPException(404, f"unknown lecture {lecture_id!r}")

    @app.get("/lectures/{lecture_id}/textbook")
    def textbook(lecture_id: str) -> dict:
        _require_lecture(lecture_id)
        paragraphs = store.textbooks.get(lecture_id, [])
        return {
            "lecture_id": lecture_id,
            "paragraphs": [
                {"paragraph_id": i, "text": p} for i, p in enumerate(paragraphs)
            ],
        }

    @app.get("/lectures/{lecture_id}/units")
    def units(
        lecture_id: str,
        from_unit: int = QueryParam(0, alias="from"),
        to: int | None = None,
    ) -> dict:
        _require_lecture(lecture_id)
        lecture_units = store.units.get(lecture_id, [])
        hi = len(lecture_units) if to is None else min(to, len(lecture_units))
        lo = max(from_unit, 0)
        return {
            "lecture_id": lecture_id,
            "units": [
                {
                    "unit_id": u.unit_id,
                    "start_ms": u.start_ms,
                    "end_ms": u.end_ms,
                    "text": u.text(),
                }
                for u in lecture_units[lo:hi]
            ],
        }

    @app.post("/query")
    def query(req: QueryRequest):
        if req.format not in ("json", "tsv"):
            raise HTTPException(400, f"unknown format {req.format!r}")
        top_n = req.top_n if req.top_n is not None else config.default_top_n
        pool = req.pool_size if req.pool_size is not None else config.default_pool_size
        if top_n < 1 or pool < 1:
            raise HTTPException(400, "top_n and pool_size must be >= 1")
        groups = query_groups(index, req.text, top_n, pool, req.lecture)
        if req.format == "tsv":
            return PlainTextResponse(format_groups_tsv(groups))
        return {
            "query": req.text,
            "top_n": top_n,
            "pool_size": pool,
            "groups": groups_to_payload(groups, store, config.media_base),
        }

    if config.static_dir and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True))

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
