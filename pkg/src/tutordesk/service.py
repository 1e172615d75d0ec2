"""HTTP/WebSocket front for the dialogue engine.

One synchronous system act per posted user message; the WebSocket stream
mirrors those acts to listening clients (the chat UI's live channel).
Sessions are restored lazily from the store, so the service can be
restarted under open dialogues. Optional static-token auth via the
X-API-Token header (or ?token= for WebSocket clients).
"""

import asyncio
import threading
from typing import Optional

from fastapi import (Depends, FastAPI, Header, HTTPException, WebSocket,
                     WebSocketDisconnect)
from pydantic import BaseModel

from .config import EngineConfig
from .engine import Engine
from .export import STREAMS, ExportFilter, build_records, select_dialogues


class MessageIn(BaseModel):
    text: str


class StreamHub:
    """Fans system-act events out to websocket subscribers per session."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subscribers = {}  # session_id -> list of (queue, loop)

    def register(self, session_id, queue, loop):
        with self._lock:
            self._subscribers.setdefault(session_id, []).append((queue, loop))

    def unregister(self, session_id, queue):
        with self._lock:
            subs = self._subscribers.get(session_id, [])
            self._subscribers[session_id] = [s for s in subs if s[0] is not queue]

    def broadcast(self, session_id, event: dict):
        with self._lock:
            subs = list(self._subscribers.get(session_id, []))
        for queue, loop in subs:
            loop.call_soon_threadsafe(queue.put_nowait, event)


def _act_payload(act) -> dict:
    payload = {
        "action": act.action,
        "utterance": act.utterance,
        "turn_index": act.turn_index,
    }
    if act.verification_payload is not None:
        payload["verification"] = [
            {"letter": letter, "slot": slot, "value": value, "provenance": kind}
            for letter, slot, value, kind in act.verification_payload
        ]
    if act.handover_ticket is not None:
        payload["handover_ticket"] = act.handover_ticket
    return payload


def create_app(config: EngineConfig = None, engine: Engine = None) -> FastAPI:
    config = config or EngineConfig()
    engine = engine or Engine(config)
    app = FastAPI(title="tutordesk", docs_url=None, redoc_url=None)
    app.state.engine = engine
    hub = StreamHub()
    locks = {}
    locks_guard = threading.Lock()

    def session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(session_id, threading.Lock())

    def auth(x_api_token: Optional[str] = Header(default=None)):
        if config.api_token and x_api_token != config.api_token:
            raise HTTPException(status_code=401, detail="invalid or missing API token")

    @app.get("/health")
    def health():
        return {"status": "ok", "locale": engine.responder.locale}

    @app.post("/sessions", status_code=201, dependencies=[Depends(auth)])
    def create_session():
        session_id = engine.new_session()
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}", dependencies=[Depends(auth)])
    def get_session(session_id: str):
        try:
            return engine.session_view(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.get("/sessions/{session_id}/transcript", dependencies=[Depends(auth)])
    def get_transcript(session_id: str):
        if engine.store is None or not engine.store.exists(session_id):
            raise HTTPException(status_code=404, detail="unknown session")
        dialogue = engine.store.read_dialogue(session_id)
        return {
            "session_id": session_id,
            "outcome": dialogue["outcome"],
            "turns": [
                {
                    "turn_index": t["turn_index"],
                    "user_text": t["user_text"],
                    "action": t["action"],
                    "response": t["response"],
                }
                for t in dialogue["turns"]
            ],
        }

    @app.post("/sessions/{session_id}/messages", dependencies=[Depends(auth)])
    def post_message(session_id: str, message: MessageIn):
        with session_lock(session_id):
            try:
                state = engine.get_state(session_id)
            except KeyError:
                raise HTTPException(status_code=404, detail="unknown session")
            if state.phase == "handed_over":
                raise HTTPException(status_code=409, detail="session already handed over")
            act = engine.handle_message(session_id, message.text)
            view = engine.session_view(session_id)
        event = {"type": "system_act", "session_id": session_id,
                 "act": _act_payload(act), "session": view}
        hub.broadcast(session_id, event)
        return {"act": _act_payload(act), "session": view}

    @app.get("/export", dependencies=[Depends(auth)])
    def export(outcome: str = "handover", since: Optional[str] = None,
               until: Optional[str] = None, formats: Optional[str] = None):
        if engine.store is None:
            raise HTTPException(status_code=409, detail="service is running without a store")
        wanted = tuple(f for f in (formats or ",".join(STREAMS)).split(",") if f)
        for fmt in wanted:
            if fmt not in STREAMS:
                raise HTTPException(status_code=422, detail=f"unknown stream {fmt!r}")
        outcomes = tuple(o for o in outcome.split(",") if o) if outcome else ()
        flt = ExportFilter(outcomes=outcomes, since=since, until=until)
        dialogues = select_dialogues(engine.store, flt)
        streams = {}
        for stream in wanted:
            records = build_records(dialogues, stream)
            streams[stream] = {
                "header": {"record": "header", "stream": stream,
                           "schema": 1, "count": len(records)},
                "records": records,
            }
        return {"streams": streams}

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str, token: Optional[str] = None):
        header_token = websocket.headers.get("x-api-token")
        if config.api_token and config.api_token not in (token, header_token):
            await websocket.close(code=4401)
            return
        try:
            engine.get_state(session_id)
        except KeyError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue = asyncio.Queue()
        hub.register(session_id, queue, asyncio.get_running_loop())
        try:
            while True:
                event = await queue.get()
                await websocket.send_json(event)
        except WebSocketDisconnect:
            pass
        finally:
            hub.unregister(session_id, queue)

    return app
