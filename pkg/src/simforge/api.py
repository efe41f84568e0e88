"""HTTP face of the workflow: JSON session operations plus run artifacts.

The browser UI consumes exactly these endpoints; it performs no computation
of its own. Static files from a built frontend are served at / when present.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, JSONResponse, Response
from pydantic import BaseModel

from .workflow import (
    EmptyDescription,
    FrontendKind,
    MissingReason,
    SessionMode,
    SessionStore,
    SimforgeConfig,
    UnknownSession,
    Workflow,
    WorkflowError,
    WrongState,
)


class NewSessionBody(BaseModel):
    description: str
    mode: str = "gated"
    frontend: str = "llm"


class DecisionBody(BaseModel):
    actor: str = "expert"
    reason: str = ""


class ExecuteBody(BaseModel):
    seed: int | None = None


class VerifyBody(BaseModel):
    actor: str = "expert"
    note: str = ""


def _http_error(exc: WorkflowError) -> HTTPException:
    if isinstance(exc, UnknownSession):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, WrongState):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, (MissingReason, EmptyDescription)):
        return HTTPException(status_code=400, detail=str(exc))
    return HTTPException(status_code=500, detail=str(exc))


def create_app(workflow: Workflow, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="simforge", version="0.1.0")
    store = workflow.store

    def guard(op):
        try:
            return op()
        except WorkflowError as exc:
            raise _http_error(exc) from exc

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/sessions")
    def list_sessions() -> list[dict]:
        return [s.to_public_dict() for s in store.list_sessions()]

    @app.post("/sessions")
    def new_session(body: NewSessionBody) -> dict:
        frontend = FrontendKind.DETERMINISTIC if body.frontend in ("det", "deterministic") \
            else FrontendKind.LLM
        session = guard(lambda: workflow.submit_description(
            body.description, SessionMode(body.mode), frontend))
        return session.to_public_dict()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return guard(lambda: store.load(session_id)).to_public_dict()

    @app.post("/sessions/{session_id}/generate")
    def generate(session_id: str) -> dict:
        return guard(lambda: workflow.generate(session_id)).to_public_dict()

    @app.post("/sessions/{session_id}/approve")
    def approve(session_id: str, body: DecisionBody) -> dict:
        return guard(lambda: workflow.approve(
            session_id, body.actor, "approve", body.reason)).to_public_dict()

    @app.post("/sessions/{session_id}/reject")
    def reject(session_id: str, body: DecisionBody) -> dict:
        return guard(lambda: workflow.approve(
            session_id, body.actor, "reject", body.reason)).to_public_dict()

    @app.post("/sessions/{session_id}/execute")
    def execute(session_id: str, body: ExecuteBody | None = None) -> dict:
        seed = body.seed if body else None
        return guard(lambda: workflow.execute(session_id, seed=seed)).to_public_dict()

    @app.post("/sessions/{session_id}/verify")
    def verify(session_id: str, body: VerifyBody | None = None) -> dict:
        actor = body.actor if body else "expert"
        note = body.note if body else ""
        return guard(lambda: workflow.verify(session_id, actor=actor, note=note)).to_public_dict()

    @app.get("/sessions/{session_id}/runs/{index}/series.csv")
    def run_csv(session_id: str, index: int) -> Response:
        path = store.run_dir(session_id, index) / "series.csv"
        if not path.exists():
            raise HTTPException(status_code=404, detail="no such run")
        return Response(content=path.read_bytes(), media_type="text/csv")

    @app.get("/sessions/{session_id}/runs/{index}/plot.svg")
    def run_svg(session_id: str, index: int) -> Response:
        path = store.run_dir(session_id, index) / "plot.svg"
        if not path.exists():
            raise HTTPException(status_code=404, detail="no such run")
        return Response(content=path.read_bytes(), media_type="image/svg+xml")

    @app.get("/sessions/{session_id}/runs/{index}/result.json")
    def run_result(session_id: str, index: int) -> Response:
        path = store.run_dir(session_id, index) / "result.json"
        if not path.exists():
            raise HTTPException(status_code=404, detail="no such run")
        return Response(content=path.read_bytes(), media_type="application/json")

    @app.get("/sessions/{session_id}/report")
    def latest_reports(session_id: str) -> JSONResponse:
        session = guard(lambda: store.load(session_id))
        reports = [
            {**store.read_report(session_id, ref["index"]), "index": ref["index"]}
            for ref in session.reports
        ]
        payload = {"session": session_id, "reports": reports}
        if session.static_report is not None:
            payload["static"] = session.static_report
        return JSONResponse(payload)

    if ui_dir is None:
        ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        index_html = ui_dir / "index.html"
        if index_html.exists():
            @app.get("/", response_class=HTMLResponse)
            def index() -> str:
                return index_html.read_text(encoding="utf-8")

        app.mount("/ui", StaticFiles(directory=ui_dir), name="ui")

    return app


def main() -> None:
    parser = argparse.ArgumentParser(description="serve the simforge HTTP API")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8821)
    parser.add_argument("--store", default="simforge_store")
    parser.add_argument("--backend", default="mock",
                        choices=["mock", "replay", "record", "live"])
    args = parser.parse_args()

    import uvicorn

    config = SimforgeConfig(store_dir=Path(args.store), backend=args.backend)
    workflow = Workflow(SessionStore(config.store_dir), config)
    uvicorn.run(create_app(workflow), host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
