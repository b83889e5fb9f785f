"""HTTP face of the session service.

Endpoints: create sessions, submit context text and images, run asks, a
server-sent event stream of the deliberation, and transcript download.
The event stream replays history from ``Last-Event-ID`` (or the
``last_event_id`` query parameter) before going live.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool

from .errors import EmoCouncilError, InvalidImage, SessionBusy, UnknownSession
from .events import LogEvent
from .session import Session, SessionManager
from .synthesis import FinalAnswer

logger = logging.getLogger(__name__)

SSE_HEARTBEAT_S = 15.0


class CreateSessionBody(BaseModel):
    mode: str = "riley"
    overrides: dict | None = None


class ContextBody(BaseModel):
    text: str


class AskBody(BaseModel):
    question: str


def _answer_json(session: Session, answer: FinalAnswer) -> dict:
    return {
        "session_id": session.id,
        "mode": session.mode.value,
        "reasoning": answer.reasoning,
        "thoughts": answer.thoughts,
        "final": answer.final,
        "winning_emotions": sorted(e.name for e in answer.winning_emotions),
    }


def _sse_frame(event: LogEvent) -> str:
    return f"id: {event.seq}\nevent: {event.kind.value}\ndata: {event.to_json()}\n\n"


def create_app(manager: SessionManager) -> FastAPI:
    app = FastAPI(title="emocouncil", version="0.1.0")
    # the companion web UI is often served from a separate static server
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.exception_handler(UnknownSession)
    async def _unknown(request: Request, exc: UnknownSession):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(SessionBusy)
    async def _busy(request: Request, exc: SessionBusy):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(InvalidImage)
    async def _bad_image(request: Request, exc: InvalidImage):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _bad_value(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(EmoCouncilError)
    async def _pipeline_error(request: Request, exc: EmoCouncilError):
        logger.exception("pipeline error")
        return JSONResponse(
            status_code=500,
            content={"detail": str(exc), "type": type(exc).__name__},
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = manager.create_session(body.mode, body.overrides)
        return {
            "session_id": session.id,
            "mode": session.mode.value,
            "emotions": [e.name for e in session.registry],
        }

    @app.post("/sessions/{session_id}/context")
    def submit_context(session_id: str, body: ContextBody):
        manager.get(session_id).submit_context(body.text)
        return {"ok": True}

    @app.post("/sessions/{session_id}/images")
    async def submit_image(session_id: str, request: Request):
        session = manager.get(session_id)
        image = await request.body()
        description = await run_in_threadpool(session.submit_image, image)
        return {"ok": True, "description": description}

    @app.post("/sessions/{session_id}/ask")
    def ask(session_id: str, body: AskBody):
        session = manager.get(session_id)
        answer = session.ask(body.question)
        return _answer_json(session, answer)

    @app.get("/sessions/{session_id}/events")
    def events(
        session_id: str,
        request: Request,
        last_event_id: int = 0,
        follow: bool = True,
    ):
        """SSE stream: replay history after ``last_event_id``, then live.

        ``follow=false`` stops after the replay instead of tailing, which
        gives a bounded response (useful for polling clients and tests).
        """
        session = manager.get(session_id)
        resume_from = last_event_id
        header_id = request.headers.get("last-event-id")
        if header_id and header_id.isdigit():
            resume_from = max(resume_from, int(header_id))

        def stream():
            last = resume_from
            with session.log.subscribe() as sub:
                for event in session.log.events(after_seq=last):
                    last = event.seq
                    yield _sse_frame(event)
                while follow:
                    event = sub.get(timeout=SSE_HEARTBEAT_S)
                    if event is None:
                        yield ": heartbeat\n\n"
                        continue
                    if event.seq <= last:
                        continue
                    last = event.seq
                    yield _sse_frame(event)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str, format: str = "jsonl"):
        session = manager.get(session_id)
        if format != "jsonl":
            return JSONResponse(
                status_code=400,
                content={"detail": f"unsupported transcript format: {format!r}"},
            )
        return Response(
            content=session.transcript_jsonl(),
            media_type="application/x-ndjson",
            headers={
                "Content-Disposition": (
                    f'attachment; filename="{session_id}.jsonl"'
                )
            },
        )

    return app
