"""HTTP surface: text queries, corpus admin, voice webhook, ops endpoints.

Request/response shapes are documented as JSON Schemas under schemas/ in
the repo root, with golden request/response pairs in tests/data/golden.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from ..corpus.segment import SourceDocument
from ..errors import (
    AdvisorError,
    BackendRefusal,
    BackendUnavailable,
    EmptyIndex,
    EmptyQuery,
    ParseError,
    ProviderUnavailable,
    TimeoutExceeded,
)
from .engine import AdvisoryEngine

logger = logging.getLogger(__name__)


class QueryRequest(BaseModel):
    question: str
    k: int | None = Field(default=None, ge=1)


class IngestRequest(BaseModel):
    manifest_path: str | None = None
    documents: list[dict] | None = None
    rules_path: str | None = None
    min_tokens: int | None = Field(default=None, ge=1)
    max_tokens: int | None = Field(default=None, ge=2)


class VoiceTurnRequest(BaseModel):
    session_id: str
    transcript: str
    locale: str = "bn-BD"


def create_app(engine: AdvisoryEngine) -> FastAPI:
    app = FastAPI(title="agroadvisor", version="0.1.0")

    @app.exception_handler(AdvisorError)
    async def advisor_error(request, exc: AdvisorError):
        from fastapi.responses import JSONResponse

        status = 500
        if isinstance(exc, (ParseError, EmptyQuery)):
            status = 400
        elif isinstance(exc, (EmptyIndex, ProviderUnavailable, BackendUnavailable, TimeoutExceeded)):
            status = 503
        elif isinstance(exc, BackendRefusal):
            status = 502
        return JSONResponse(
            status_code=status,
            content={"detail": f"{type(exc).__name__}: {exc}"},
        )

    @app.get("/health")
    def health() -> dict:
        return engine.health()

    @app.get("/metrics", response_class=PlainTextResponse)
    def metrics() -> str:
        return engine.metrics.render()

    @app.post("/query")
    def query(req: QueryRequest) -> dict:
        return engine.query(req.question, k=req.k)

    @app.post("/ingest")
    def ingest(req: IngestRequest) -> dict:
        from ..corpus import ChunkingConfig

        chunking = None
        if req.min_tokens or req.max_tokens:
            chunking = ChunkingConfig(
                min_tokens=req.min_tokens or 150, max_tokens=req.max_tokens or 300
            )
        if req.manifest_path:
            chunks = engine.ingest_manifest(req.manifest_path, req.rules_path, chunking)
            n_docs = len({c.doc_id for c in chunks})
        elif req.documents is not None:
            try:
                docs = [SourceDocument(**row) for row in req.documents]
            except (TypeError, ValueError) as exc:
                raise ParseError(f"bad inline document: {exc}") from exc
            chunks = engine.ingest_documents(docs, req.rules_path, chunking)
            n_docs = len(docs)
        else:
            raise ParseError("provide manifest_path or documents")
        engine.build_index(chunks)
        return {"documents": n_docs, "chunks": len(chunks)}

    @app.get("/chunks")
    def list_chunks(
        topic: str | None = None,
        source_kind: str | None = None,
        offset: int = 0,
        limit: int = 50,
    ) -> dict:
        idx = engine.require_index()
        rows = list(idx.iter_metadata())
        if topic:
            rows = [r for r in rows if topic in r.get("topic", "")]
        if source_kind:
            rows = [r for r in rows if r.get("source_kind") == source_kind]
        window = rows[offset : offset + limit]
        return {
            "total": len(rows),
            "offset": offset,
            "chunks": [
                {k: v for k, v in row.items() if k != "text"}
                | {"snippet": row["text"][:240]}
                for row in window
            ],
        }

    @app.get("/chunks/{chunk_id}")
    def get_chunk(chunk_id: str) -> dict:
        idx = engine.require_index()
        try:
            return idx.metadata(chunk_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no chunk {chunk_id!r}")

    @app.post("/voice/turn")
    def voice_turn(req: VoiceTurnRequest) -> dict:
        if not req.transcript.strip():
            raise HTTPException(status_code=400, detail="transcript must be nonempty")
        return engine.voice_turn(req.session_id, req.transcript)

    @app.get("/voice/session/{session_id}")
    def get_session(session_id: str) -> dict:
        engine.sessions.sweep()  # expired sessions read back as closed
        session = engine.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return session.snapshot()

    @app.delete("/voice/session/{session_id}")
    def delete_session(session_id: str) -> dict:
        if not engine.sessions.delete(session_id):
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return {"deleted": session_id}

    @app.get("/eval/report")
    def eval_report() -> dict:
        out_dir = engine.config.eval.out_dir
        if not out_dir or not (Path(out_dir) / "report.json").is_file():
            raise HTTPException(
                status_code=404,
                detail="no evaluation report; run the eval subcommand and set eval.out_dir",
            )
        base = Path(out_dir)
        report = json.loads((base / "report.json").read_text(encoding="utf-8"))
        plots = {}
        for name in ("distribution.json", "radar.json", "gains.json", "scatter.json"):
            path = base / name
            if path.is_file():
                plots[name.removesuffix(".json")] = json.loads(path.read_text(encoding="utf-8"))
        return {"report": report, "plots": plots}

    return app


def serve(engine: AdvisoryEngine) -> None:
    """Run uvicorn; startup failures exit with one diagnostic line."""
    import uvicorn

    try:
        engine.ensure_index()
    except AdvisorError as exc:
        raise SystemExit(f"startup failed: index: {exc}")
    app = create_app(engine)
    uvicorn.run(app, host=engine.config.server.host, port=engine.config.server.port, log_level="info")
