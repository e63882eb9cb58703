"""Multi-session board server.

HTTP surface:
  POST /posters                upload a poster manifest
  GET  /posters                list registered posters
  POST /sessions               start a session for a poster
  GET  /sessions/{sid}/state   current board snapshot

Each session also exposes one bidirectional JSON stream at
/sessions/{sid}/stream (WebSocket). Client messages:

  {"type": "token_event", "token": "Mover", "phase": "placed", "col": 3, "row": 4}
  {"type": "media_ended", "object_id": "a"}
  {"type": "save_layout", "name": "scene-1"}
  {"type": "restore_layout", "name": "scene-1"}

Server messages, broadcast to every subscriber: "signal", "playback",
and "state", in that order per accepted event, all tagged with the
event's sequence number. The state message always carries the full
board snapshot; subscribers never need deltas. Malformed or unknown
requests get a direct {"type": "error"} reply and change nothing.

Events are applied under a per-session lock, so each session has a
single writer and every subscriber sees the same sequence.
"""

from __future__ import annotations

import asyncio
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware

from . import persist, playback
from .errors import ManifestError
from .gesture import (
    ConsumeResult,
    Phase,
    PresenceTracker,
    TokenEvent,
    TokenKind,
    consume,
)
from .model import Board, CellCoord
from .persist import LayoutSnapshot, PosterManifest
from .signals import Signal, SignalCode


@dataclass
class Session:
    id: str
    board: Board
    seq: int = 0
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    subscribers: list[asyncio.Queue] = field(default_factory=list)
    events: list[TokenEvent] = field(default_factory=list)
    presence: PresenceTracker = field(default_factory=PresenceTracker)
    last_ts: int = 0


class Registry:
    """In-memory posters, sessions, and saved layouts for one server."""

    def __init__(self, data_dir: Path | None = None) -> None:
        self.data_dir = data_dir
        self.posters: dict[str, PosterManifest] = {}
        self.sessions: dict[str, Session] = {}
        self.layouts: dict[str, dict[str, LayoutSnapshot]] = {}
        if data_dir is not None:
            self._load_disk()

    def _load_disk(self) -> None:
        poster_dir = self.data_dir / "posters"
        if poster_dir.is_dir():
            for path in sorted(poster_dir.glob("*.json")):
                manifest = persist.parse_manifest(path.read_text(encoding="utf-8"))
                self.posters[manifest.poster_id] = manifest
        layout_root = self.data_dir / "layouts"
        if layout_root.is_dir():
            for poster_dir in sorted(p for p in layout_root.iterdir() if p.is_dir()):
                for path in sorted(poster_dir.glob("*.json")):
                    snapshot = persist.parse_snapshot(path.read_text(encoding="utf-8"))
                    self.layouts.setdefault(poster_dir.name, {})[snapshot.name] = snapshot

    def add_poster(self, manifest: PosterManifest) -> None:
        self.posters[manifest.poster_id] = manifest
        if self.data_dir is not None:
            poster_dir = self.data_dir / "posters"
            poster_dir.mkdir(parents=True, exist_ok=True)
            path = poster_dir / f"{manifest.poster_id}.json"
            path.write_text(persist.serialize_manifest(manifest), encoding="utf-8")

    def save_layout(self, poster_id: str, snapshot: LayoutSnapshot) -> None:
        self.layouts.setdefault(poster_id, {})[snapshot.name] = snapshot
        if self.data_dir is not None:
            layout_dir = self.data_dir / "layouts" / poster_id
            layout_dir.mkdir(parents=True, exist_ok=True)
            path = layout_dir / f"{snapshot.name}.json"
            path.write_text(persist.serialize_snapshot(snapshot), encoding="utf-8")

    def get_layout(self, poster_id: str, name: str) -> LayoutSnapshot | None:
        return self.layouts.get(poster_id, {}).get(name)


def _state_message(session: Session) -> dict:
    pending = session.board.pending
    return {
        "type": "state",
        "seq": session.seq,
        "board": persist.board_to_dict(session.board),
        "pending": pending.to_dict() if pending is not None else None,
        "tokens": session.presence.to_dict(),
    }


def _bundle(session: Session, signals: list[Signal], commands: list) -> list[dict]:
    messages = [{"type": "signal", "seq": session.seq, **signal.to_dict()} for signal in signals]
    messages += [{"type": "playback", "seq": session.seq, **cmd.to_dict()} for cmd in commands]
    messages.append(_state_message(session))
    return messages


def _broadcast(session: Session, messages: list[dict]) -> None:
    for queue in session.subscribers:
        for message in messages:
            queue.put_nowait(message)


def _parse_token_event(session: Session, data: dict) -> TokenEvent | str:
    """Build a TokenEvent from a stream message, or return a complaint."""
    try:
        token = TokenKind(data.get("token"))
        phase = Phase(data.get("phase"))
    except ValueError:
        return "unknown token or phase"
    col, row = data.get("col"), data.get("row")
    if not isinstance(col, int) or not isinstance(row, int):
        return "col/row must be integers"
    try:
        cell = CellCoord(col, row)
    except Exception:
        return f"cell ({col}, {row}) is off the grid"
    # The server stamps arrival time, clamped so session time never runs
    # backwards; board semantics do not depend on the timestamp.
    ts = max(int(time.time() * 1000), session.last_ts)
    return TokenEvent(ts, token, phase, cell)


def create_app(data_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="storygrid session server")
    # Browser clients are typically served from a separate static origin.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    registry = Registry(data_dir)
    app.state.registry = registry

    def _session_or_404(session_id: str) -> Session:
        session = registry.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session '{session_id}'")
        return session

    @app.post("/posters")
    async def upload_poster(body: dict) -> dict:
        try:
            manifest = persist.manifest_from_dict(body)
        except ManifestError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        registry.add_poster(manifest)
        return {"poster_id": manifest.poster_id}

    @app.get("/posters")
    async def list_posters() -> list[dict]:
        return [
            {"poster_id": m.poster_id, "title": m.title, "objects": len(m.objects)}
            for m in sorted(registry.posters.values(), key=lambda m: m.poster_id)
        ]

    @app.post("/sessions")
    async def create_session(body: dict) -> dict:
        poster_id = body.get("poster_id")
        manifest = registry.posters.get(poster_id)
        if manifest is None:
            raise HTTPException(status_code=404, detail=f"unknown poster '{poster_id}'")
        session = Session(id=uuid.uuid4().hex[:12], board=persist.load_poster(manifest))
        registry.sessions[session.id] = session
        return {"session_id": session.id, "poster_id": poster_id}

    @app.get("/sessions/{session_id}/state")
    async def session_state(session_id: str) -> dict:
        session = _session_or_404(session_id)
        async with session.lock:
            return _state_message(session)

    async def _apply_token_event(session: Session, event: TokenEvent) -> None:
        async with session.lock:
            session.seq += 1
            session.last_ts = event.ts_ms
            session.events.append(event)
            session.presence.update(event)
            result: ConsumeResult = consume(session.board, event)
            _broadcast(session, _bundle(session, result.signals, result.commands))

    async def _apply_media_ended(session: Session, object_id: str) -> None:
        async with session.lock:
            session.seq += 1
            changed = playback.on_media_ended(session.board, object_id)
            signals = []
            if not changed:
                signals.append(Signal(SignalCode.NOT_PLAYING, "media_ended ignored"))
            _broadcast(session, _bundle(session, signals, []))

    async def _apply_save(session: Session, name: str) -> None:
        async with session.lock:
            session.seq += 1
            snapshot = persist.save_layout(session.board, name)
            registry.save_layout(session.board.poster_id, snapshot)
            signals = [Signal(SignalCode.OP_COMPLETED, f"layout '{name}' saved")]
            _broadcast(session, _bundle(session, signals, []))

    async def _apply_restore(session: Session, snapshot: LayoutSnapshot) -> None:
        async with session.lock:
            session.seq += 1
            commands = persist.restore_layout(session.board, snapshot)
            _broadcast(session, _bundle(session, [], commands))

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str) -> None:
        await websocket.accept()
        session = registry.sessions.get(session_id)
        if session is None:
            await websocket.send_json(
                {"type": "error", "detail": f"unknown session '{session_id}'"}
            )
            await websocket.close()
            return

        queue: asyncio.Queue = asyncio.Queue()
        async with session.lock:
            # Joining snapshot first, then live updates, in seq order.
            queue.put_nowait(_state_message(session))
            session.subscribers.append(queue)

        async def writer() -> None:
            while True:
                await websocket.send_json(await queue.get())

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                try:
                    data = await websocket.receive_json()
                except ValueError:
                    await websocket.send_json({"type": "error", "detail": "invalid JSON"})
                    continue
                if not isinstance(data, dict):
                    await websocket.send_json({"type": "error", "detail": "not an object"})
                    continue
                kind = data.get("type")
                if kind == "token_event":
                    event = _parse_token_event(session, data)
                    if isinstance(event, str):
                        await websocket.send_json({"type": "error", "detail": event})
                        continue
                    await _apply_token_event(session, event)
                elif kind == "media_ended":
                    object_id = data.get("object_id")
                    if not isinstance(object_id, str):
                        await websocket.send_json(
                            {"type": "error", "detail": "object_id must be a string"}
                        )
                        continue
                    await _apply_media_ended(session, object_id)
                elif kind == "save_layout":
                    name = data.get("name")
                    if not isinstance(name, str) or not name or "/" in name:
                        await websocket.send_json(
                            {"type": "error", "detail": "bad layout name"}
                        )
                        continue
                    await _apply_save(session, name)
                elif kind == "restore_layout":
                    name = data.get("name")
                    snapshot = (
                        registry.get_layout(session.board.poster_id, name)
                        if isinstance(name, str)
                        else None
                    )
                    if snapshot is None:
                        await websocket.send_json(
                            {"type": "error", "detail": f"unknown layout '{name}'"}
                        )
                        continue
                    await _apply_restore(session, snapshot)
                else:
                    await websocket.send_json(
                        {"type": "error", "detail": f"unknown message type '{kind}'"}
                    )
        except WebSocketDisconnect:
            pass
        finally:
            writer_task.cancel()
            async with session.lock:
                if queue in session.subscribers:
                    session.subscribers.remove(queue)

    return app
