"""The quiz hub: one process exposing the HTTP API, the WebSocket bridge,
and file-backed persistence on a single port.

Concurrency contract: a single asyncio lock totally orders every session
mutation (presses, ticks, start/stop) and every bank mutation, so the frame
stream every screen sees is a prefix-consistent replay of the engine's
events. The session works on a bank snapshot taken at start; syncing
mid-session never alters a running quiz.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import time
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import engine, wire
from .auth import TokenRegistry, hash_password, verify_password
from .engine import Order, Phase, SessionConfig, SessionState, WrongPolicy
from .model import (
    Question,
    TeacherAccount,
    ValidationError,
    bank_to_doc,
    merge_sync_payload,
    validate_question,
)
from .store import Store, load_store, persist_store
from .wire import ClientRole

log = logging.getLogger("interactive_edu.hub")

DEFAULT_ADDR = "0.0.0.0:8080"
_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>Interactive Edu</title></head>
<body><h1>Interactive Edu hub</h1>
<p>No screen bundle installed. Connect a quiz screen to <code>/ws</code>.</p>
</body></html>"""


def now_ms() -> int:
    return int(time.time() * 1000)


def _json_log(event: str, **fields) -> None:
    log.info(json.dumps({"event": event, "at": now_ms(), **fields}, separators=(",", ":")))


class Hub:
    """All mutable server state, guarded by one lock."""

    def __init__(self, store_path: Path, token_ttl_ms: int = 12 * 3600 * 1000):
        self.store_path = Path(store_path)
        self.store: Store = load_store(self.store_path)
        self.tokens = TokenRegistry(ttl_ms=token_ttl_ms)
        self.lock = asyncio.Lock()
        self.session: SessionState | None = None
        self.connections: dict[WebSocket, ClientRole] = {}
        self._driver: asyncio.Task | None = None

    # -- persistence ------------------------------------------------------

    def _persist(self) -> None:
        persist_store(self.store, self.store_path)

    # -- broadcasting -----------------------------------------------------

    async def _send(self, ws: WebSocket, frame: dict) -> None:
        try:
            await ws.send_text(wire.encode(frame))
        except Exception:
            self.connections.pop(ws, None)

    async def broadcast_events(self, events: list[engine.SessionEvent]) -> None:
        for event in events:
            frame = wire.event_frame(event)
            is_feedback = frame["type"] == "feedback"
            if is_feedback:
                _json_log("feedback", correct=frame["correct"], segment=frame["segment"])
            for ws, role in list(self.connections.items()):
                if role in (ClientRole.SCREEN, ClientRole.OBSERVER) or is_feedback:
                    await self._send(ws, frame)

    # -- session driver ---------------------------------------------------

    def _driver_running(self) -> bool:
        return self._driver is not None and not self._driver.done()

    def start_driver(self) -> None:
        if not self._driver_running():
            self._driver = asyncio.ensure_future(self._drive())

    async def _drive(self) -> None:
        """Inject ticks so a feedback hold expires on time (within 50 ms)."""
        while True:
            async with self.lock:
                state = self.session
                if state is None or state.phase is Phase.FINISHED:
                    return
                if state.phase is Phase.FEEDBACK:
                    assert state.feedback_until is not None
                    delay = max(0.0, (state.feedback_until - now_ms()) / 1000)
                else:
                    delay = 0.01
            await asyncio.sleep(delay)
            async with self.lock:
                if self.session is None:
                    return
                self.session, events = engine.tick(self.session, now_ms())
                await self.broadcast_events(events)

    # -- auth -------------------------------------------------------------

    def authenticate(self, request: Request) -> str | None:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            return None
        token = self.tokens.authenticate(header[7:].strip())
        return token.teacher if token else None


def _error(status: int, code: str, detail: str, errors: list | None = None) -> JSONResponse:
    body: dict = {"error": code, "detail": detail}
    if errors is not None:
        body["errors"] = errors
    return JSONResponse(body, status_code=status)


async def _body_json(request: Request) -> dict | None:
    try:
        body = await request.json()
    except Exception:
        return None
    return body if isinstance(body, dict) else None


def create_app(hub: Hub, assets_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="interactive-edu hub")
    app.state.hub = hub

    # -- teacher accounts -------------------------------------------------

    @app.post("/api/teachers/register")
    async def register(request: Request):
        body = await _body_json(request)
        if body is None:
            return _error(400, "malformed_body", "expected a JSON object")
        username, password = body.get("username"), body.get("password")
        if not isinstance(username, str) or not username.strip():
            return _error(400, "malformed_body", "username must be a non-empty string")
        if not isinstance(password, str) or not password:
            return _error(400, "malformed_body", "password must be a non-empty string")
        async with hub.lock:
            if any(t.username == username for t in hub.store.teachers):
                return _error(409, "duplicate_username", f"{username!r} is already registered")
            account = TeacherAccount(
                username=username, password_hash=hash_password(password), created_at=now_ms()
            )
            hub.store = Store(teachers=hub.store.teachers + (account,), bank=hub.store.bank)
            hub._persist()
        _json_log("teacher_registered", username=username)
        return JSONResponse({"username": username}, status_code=201)

    @app.post("/api/teachers/login")
    async def login(request: Request):
        body = await _body_json(request)
        if body is None:
            return _error(400, "malformed_body", "expected a JSON object")
        username, password = body.get("username"), body.get("password")
        account = next((t for t in hub.store.teachers if t.username == username), None)
        if account is None or not isinstance(password, str) or not verify_password(
            password, account.password_hash
        ):
            return _error(401, "bad_credentials", "unknown username or wrong password")
        token = hub.tokens.issue(username)
        _json_log("teacher_login", username=username)
        return JSONResponse({"token": token.token, "expires_at": token.expires_at})

    # -- question bank ----------------------------------------------------

    @app.post("/api/sync")
    async def sync(request: Request):
        teacher = hub.authenticate(request)
        if teacher is None:
            return _error(401, "unauthorized", "missing or expired token")
        body = await _body_json(request)
        if body is None:
            return _error(400, "malformed_body", "expected a JSON object")
        raw_questions = body.get("questions", [])
        deletions = body.get("deletions", [])
        if not isinstance(raw_questions, list) or not isinstance(deletions, list):
            return _error(400, "malformed_body", "questions and deletions must be lists")
        questions: list[Question] = []
        issues: list[dict] = []
        for raw in raw_questions:
            if not isinstance(raw, dict):
                issues.append({"code": "MalformedQuestion", "detail": "question must be an object"})
                continue
            try:
                questions.append(validate_question(raw))
            except ValidationError as e:
                issues.extend(i.to_dict() for i in e.issues)
        if issues:
            return _error(400, "validation_failed", "payload rejected, bank unchanged", issues)
        async with hub.lock:
            hub.store = Store(
                teachers=hub.store.teachers,
                bank=merge_sync_payload(hub.store.bank, questions, [str(d) for d in deletions]),
            )
            hub._persist()
            revision = hub.store.bank.revision
        _json_log("sync", teacher=teacher, questions=len(questions), deletions=len(deletions),
                  revision=revision)
        return JSONResponse({"revision": revision})

    @app.get("/api/questions")
    async def get_questions(request: Request):
        if hub.authenticate(request) is None:
            return _error(401, "unauthorized", "missing or expired token")
        return JSONResponse(bank_to_doc(hub.store.bank))

    @app.delete("/api/questions/{question_id}")
    async def delete_question(question_id: str, request: Request):
        teacher = hub.authenticate(request)
        if teacher is None:
            return _error(401, "unauthorized", "missing or expired token")
        async with hub.lock:
            if all(q.id != question_id for q in hub.store.bank.questions):
                return _error(404, "not_found", f"no question with id {question_id!r}")
            hub.store = Store(
                teachers=hub.store.teachers,
                bank=merge_sync_payload(hub.store.bank, [], [question_id]),
            )
            hub._persist()
            revision = hub.store.bank.revision
        _json_log("delete_question", teacher=teacher, question_id=question_id, revision=revision)
        return JSONResponse({"revision": revision})

    # -- session control ---------------------------------------------------

    @app.post("/api/session/start")
    async def session_start(request: Request):
        teacher = hub.authenticate(request)
        if teacher is None:
            return _error(401, "unauthorized", "missing or expired token")
        body = await _body_json(request) or {}
        try:
            config = SessionConfig(
                order=Order(body.get("order", "sequential")),
                shuffle_seed=int(body.get("shuffle_seed", 0)),
                wrong_policy=WrongPolicy(body.get("wrong_policy", "advance")),
                feedback_hold_ms=int(body.get("feedback_hold_ms", 2000)),
                press_debounce_ms=int(body.get("press_debounce_ms", 300)),
            )
        except (ValueError, TypeError) as e:
            return _error(400, "malformed_body", f"bad session config: {e}")
        async with hub.lock:
            if hub.session is not None and hub.session.phase is not Phase.FINISHED:
                return _error(409, "session_running", "a session is already running")
            try:
                hub.session, events = engine.start_session(hub.store.bank, config, now_ms())
            except engine.EmptyBank:
                return _error(409, "EmptyBank", "cannot start a session on an empty bank")
            await hub.broadcast_events(events)
            hub.start_driver()
        _json_log("session_start", teacher=teacher, order=config.order.value,
                  total=len(hub.session.question_order))
        return JSONResponse({"phase": hub.session.phase.value,
                             "total": len(hub.session.question_order)})

    @app.post("/api/session/stop")
    async def session_stop(request: Request):
        teacher = hub.authenticate(request)
        if teacher is None:
            return _error(401, "unauthorized", "missing or expired token")
        async with hub.lock:
            if hub.session is None:
                return _error(409, "no_session", "no session to stop")
            summary = engine.summarize(hub.session)
            hub.session = None
        _json_log("session_stop", teacher=teacher, correct_count=summary.correct_count)
        return JSONResponse(
            {
                "total": summary.total,
                "correct_count": summary.correct_count,
                "entries": [
                    {
                        "question_id": e.question_id,
                        "segment": e.segment,
                        "was_correct": e.was_correct,
                        "at": e.at,
                        "attempt": e.attempt,
                    }
                    for e in summary.entries
                ],
            }
        )

    @app.get("/api/session")
    async def session_status():
        state = hub.session
        if state is None:
            return JSONResponse({"phase": "idle", "index": 0, "total": 0, "correct_count": 0})
        index = min(state.cursor + 1, len(state.question_order))
        return JSONResponse(
            {
                "phase": state.phase.value,
                "index": index,
                "total": len(state.question_order),
                "correct_count": state.correct_count,
            }
        )

    # -- websocket bridge --------------------------------------------------

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        role: ClientRole | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    frame = wire.decode(raw)
                except wire.FrameError as e:
                    await ws.send_text(wire.encode(wire.error(e.code, e.detail)))
                    if role is None:
                        await ws.close()
                        return
                    continue

                if role is None and frame["type"] != "hello":
                    await ws.send_text(
                        wire.encode(wire.error("protocol_violation", "first frame must be hello"))
                    )
                    await ws.close()
                    return

                if frame["type"] == "hello":
                    try:
                        wanted = ClientRole(frame.get("role"))
                    except ValueError:
                        await ws.send_text(
                            wire.encode(wire.error("malformed_frame", "unknown role"))
                        )
                        if role is None:
                            await ws.close()
                            return
                        continue
                    if role is not None and wanted is not role:
                        await ws.send_text(
                            wire.encode(wire.error("role_violation", "role is fixed at hello time"))
                        )
                        continue
                    role = wanted
                    self_resync: dict | None = None
                    async with hub.lock:
                        hub.connections[ws] = role
                        state = hub.session
                        if (
                            role in (ClientRole.SCREEN, ClientRole.OBSERVER)
                            and state is not None
                            and state.phase in (Phase.PRESENTING, Phase.FEEDBACK)
                        ):
                            self_resync = wire.event_frame(engine.post_current(state))
                    await ws.send_text(wire.encode(wire.welcome(role)))
                    if self_resync is not None:
                        await ws.send_text(wire.encode(self_resync))
                    continue

                if frame["type"] == "press":
                    if role is not ClientRole.FLOOR:
                        await ws.send_text(
                            wire.encode(wire.error("role_violation", "only the floor may press"))
                        )
                        continue
                    segment = frame.get("segment")
                    if not isinstance(segment, int) or isinstance(segment, bool):
                        await ws.send_text(
                            wire.encode(wire.error("malformed_frame", "segment must be an integer"))
                        )
                        continue
                    async with hub.lock:
                        if hub.session is None:
                            continue  # no session: press falls into the void
                        try:
                            hub.session, events = engine.handle_press(
                                hub.session, segment, now_ms()
                            )
                        except engine.SegmentOutOfRange as e:
                            await ws.send_text(
                                wire.encode(wire.error("segment_out_of_range", str(e)))
                            )
                            continue
                        _json_log("press", segment=segment, phase=hub.session.phase.value)
                        await hub.broadcast_events(events)
                    continue

                await ws.send_text(
                    wire.encode(wire.error("malformed_frame", f"unknown type {frame['type']!r}"))
                )
        except WebSocketDisconnect:
            pass
        finally:
            hub.connections.pop(ws, None)

    # -- static screen bundle ----------------------------------------------

    if assets_dir is not None and Path(assets_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(assets_dir), html=True), name="screen")
    else:

        @app.get("/")
        async def placeholder():
            return HTMLResponse(_PLACEHOLDER_PAGE)

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="edu-hub", description="Interactive Edu quiz hub")
    parser.add_argument("--store", default=os.environ.get("INTERACTIVE_EDU_STORE", "store.json"))
    parser.add_argument("--listen", default=os.environ.get("INTERACTIVE_EDU_ADDR", DEFAULT_ADDR))
    parser.add_argument("--assets", default=os.environ.get("INTERACTIVE_EDU_ASSETS"))
    parser.add_argument("--token-ttl-s", type=int, default=12 * 3600)
    args = parser.parse_args(argv)

    import uvicorn

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    hub = Hub(Path(args.store), token_ttl_ms=args.token_ttl_s * 1000)
    app = create_app(hub, assets_dir=Path(args.assets) if args.assets else None)
    host, _, port = args.listen.rpartition(":")
    uvicorn.run(
        app,
        host=host or "0.0.0.0",
        port=int(port),
        ws_ping_interval=15,
        ws_ping_timeout=30,
        log_level="warning",
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
