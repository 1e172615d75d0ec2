"""Wires the pipeline into a ready-to-talk engine.

An Engine owns the loaded catalog, normalizer and intent rules, the
template responder and the policy, plus the set of live sessions. With a
storage path configured every turn is persisted before the caller sees
the response, and sessions restore transparently from their last
snapshot after a restart.
"""

import uuid
from datetime import datetime, timezone

from tutordesk.catalog import build_index, load_catalog
from tutordesk.config import EngineConfig
from tutordesk.dialogue_state import CURRENT_DESIGN, is_complete, state_of
from tutordesk.nlu import SLOTS, load_intent_rules
from tutordesk.normalizer import load_normalizer_config
from tutordesk.policy import MetaPolicy, SessionState, SystemAct, build_handover_ticket
from tutordesk.responder import Responder, load_templates
from tutordesk.store import DialogueStore


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Engine:
    def __init__(self, config: EngineConfig = None, clock=None, design=CURRENT_DESIGN):
        self.config = config or EngineConfig()
        self.design = design
        self.norm_cfg = load_normalizer_config(self.config.normalizer_path)
        self.catalog = load_catalog(self.config.catalog_path)
        self.index = build_index(self.catalog.entries, self.norm_cfg)
        self.rules = load_intent_rules(self.norm_cfg, self.config.intents_path)
        self.templates = load_templates(self.config.templates_path)
        self.responder = Responder(self.templates, self.catalog, self.config.locale)
        self.policy = MetaPolicy(
            self.index, self.catalog, self.rules, self.norm_cfg,
            self.responder, design=design,
        )
        self.store = (
            DialogueStore(self.config.storage_path)
            if self.config.storage_path else None
        )
        self.clock = clock or _utc_now
        self.sessions = {}

    # -- session lifecycle ---------------------------------------------------

    def new_session(self, session_id: str = None) -> str:
        session_id = session_id or uuid.uuid4().hex[:12]
        if session_id in self.sessions or (self.store and self.store.exists(session_id)):
            raise ValueError(f"session {session_id!r} already exists")
        self.sessions[session_id] = SessionState(session_id=session_id)
        if self.store:
            self.store.begin(session_id, self.responder.locale, self.clock())
        return session_id

    def get_state(self, session_id: str) -> SessionState:
        state = self.sessions.get(session_id)
        if state is not None:
            return state
        if self.store and self.store.exists(session_id):
            snapshot = self.store.load_snapshot(session_id)
            if snapshot is None or snapshot.get("_fresh"):
                state = SessionState(session_id=session_id)
            else:
                state = SessionState.from_dict(snapshot)
            self.sessions[session_id] = state
            return state
        raise KeyError(session_id)

    # -- conversation ----------------------------------------------------------

    def handle_message(self, session_id: str, text: str) -> SystemAct:
        state = self.get_state(session_id)
        act = self.policy.step(state, text)
        if self.store:
            self.store.append_turn(session_id, self._turn_record(state, text, act))
            if act.action == "human_handover":
                self.store.close(
                    session_id, "handover", state.handover_reason,
                    build_handover_ticket(state, self.design), self.clock(),
                )
        return act

    def _turn_record(self, state: SessionState, text: str, act: SystemAct) -> dict:
        extraction = act.extraction
        return {
            "turn_index": act.turn_index,
            "user_text": text,
            "intent": extraction.intent if extraction else None,
            "human_requested": bool(extraction and extraction.human_requested),
            "intent_span": list(extraction.intent_span)
            if extraction and extraction.intent_span else None,
            "slot_updates": [
                {
                    "slot": u.slot, "value": u.value,
                    "start": u.start, "end": u.end,
                    "confidence": round(u.confidence, 6),
                }
                for u in (extraction.slot_updates if extraction else [])
            ],
            "action": act.action,
            "response": act.utterance,
            "at": self.clock(),
            "session": state.to_dict(),
        }

    # -- views -------------------------------------------------------------

    def session_view(self, session_id: str) -> dict:
        state = self.get_state(session_id)
        slots = {}
        for slot in SLOTS:
            prov = state.info.provenance.get(slot)
            slots[slot] = {
                "value": state.info.get(slot),
                "provenance": prov.kind if prov else None,
            }
        return {
            "session_id": state.session_id,
            "phase": state.phase,
            "intent": state.intent,
            "turn_index": state.turn_index,
            "last_system_action": state.last_system_action,
            "awaiting_slot": state.awaiting_slot,
            "pending_letter": state.pending_letter,
            "letter_map": dict(state.letter_map),
            "slots": slots,
            "complete": is_complete(state.info, self.design),
            "state_flags": sorted(state_of(state.info, self.design).flags),
            "outcome": state.outcome,
            "handover_reason": state.handover_reason,
        }
