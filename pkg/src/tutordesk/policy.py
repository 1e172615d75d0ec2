"""Turn-level dialogue policy over the slot-filling state machine.

Every user message passes through the same gate order: the human-escape
keyword first, then the handling of whatever question is currently open
(intent menu, verification yes/no, correction letter/value, free-text
summary), and only then regular slot collection. Re-asks are bounded:
the third consecutive failure on a slot stores the raw user text as
ground truth, the third unclassified intent (or failed verification
answer) hands the session to a human.
"""

import re
from dataclasses import dataclass, field

from tutordesk.dialogue_state import CURRENT_DESIGN, is_complete, next_action, state_of
from tutordesk.nlu import (
    ExtractionResult,
    InformationDictionary,
    Provenance,
    VERIFICATION_ORDER,
    apply_updates,
    extract,
    parse_affirmation,
)
from tutordesk.normalizer import normalize

ASK_ACTIONS = (
    "ask_topic",
    "ask_exam_mode",
    "ask_level",
    "ask_subtopic",
    "ask_question_number",
)
META_ACTIONS = (
    "final_request",
    "verify_request",
    "correct_request",
    "exact_question",
    "human_handover",
    "unknown_intent_menu",
    "org_ack",
    "context_ack",
)
ACTIONS = ASK_ACTIONS + META_ACTIONS

ASK_SLOT = {
    "ask_topic": "topic",
    "ask_exam_mode": "exam_mode",
    "ask_level": "exam_level",
    "ask_subtopic": "subtopic",
    "ask_question_number": "question_number",
}

PHASES = (
    "collecting",
    "verifying",
    "correcting",
    "awaiting_exact_question",
    "handed_over",
    "intent_menu",
)

MAX_ATTEMPTS = 3
_LETTER_RE = re.compile(r"^\(?([a-e])\)?\.?$")
_EMBEDDED_LETTER_RE = re.compile(r"\b([a-e])\)(?!\w)")


@dataclass
class SessionState:
    session_id: str
    info: InformationDictionary = field(default_factory=InformationDictionary)
    phase: str = "collecting"
    intent: str = None
    pending_letter: str = None
    fallback_counts: dict = field(default_factory=dict)
    intent_attempts: int = 0
    last_system_action: str = None
    awaiting_slot: str = None
    letter_map: dict = field(default_factory=dict)
    turn_index: int = 0
    history_texts: list = field(default_factory=list)
    outcome: str = None
    handover_reason: str = None

    def to_dict(self):
        return {
            "session_id": self.session_id,
            "info": self.info.to_dict(),
            "phase": self.phase,
            "intent": self.intent,
            "pending_letter": self.pending_letter,
            "fallback_counts": dict(self.fallback_counts),
            "intent_attempts": self.intent_attempts,
            "last_system_action": self.last_system_action,
            "awaiting_slot": self.awaiting_slot,
            "letter_map": dict(self.letter_map),
            "turn_index": self.turn_index,
            "history_texts": list(self.history_texts),
            "outcome": self.outcome,
            "handover_reason": self.handover_reason,
        }

    @classmethod
    def from_dict(cls, doc):
        state = cls(session_id=doc["session_id"])
        state.info = InformationDictionary.from_dict(doc["info"])
        for key in (
            "phase", "intent", "pending_letter", "intent_attempts",
            "last_system_action", "awaiting_slot", "turn_index",
            "outcome", "handover_reason",
        ):
            setattr(state, key, doc[key])
        state.fallback_counts = dict(doc["fallback_counts"])
        state.letter_map = dict(doc["letter_map"])
        state.history_texts = list(doc["history_texts"])
        return state


@dataclass
class SystemAct:
    action: str
    utterance: str
    verification_payload: list = None  # [(letter, slot, value, provenance kind)]
    handover_ticket: dict = None
    extraction: object = None  # this turn's ExtractionResult, for the logs
    turn_index: int = None


def parse_letter(text: str, letter_map: dict):
    """A correction letter: the whole message ("d", "d)", "(d)") or an
    embedded "d)" reference."""
    stripped = text.strip().lower()
    match = _LETTER_RE.match(stripped)
    if match and match.group(1) in letter_map:
        return match.group(1)
    match = _EMBEDDED_LETTER_RE.search(stripped)
    if match and match.group(1) in letter_map:
        return match.group(1)
    return None


class MetaPolicy:
    """Drives one session turn by turn; stateless across sessions."""

    def __init__(self, index, catalog, rules, norm_cfg, responder,
                 design=CURRENT_DESIGN, params=None):
        self.index = index
        self.catalog = catalog
        self.rules = rules
        self.norm_cfg = norm_cfg
        self.responder = responder
        self.design = design
        self.params = params or index.params

    # -- helpers ----------------------------------------------------------

    def _verification_payload(self, state: SessionState) -> list:
        payload = []
        letters = "abcde"
        filled = [s for s in VERIFICATION_ORDER if state.info.get(s) is not None]
        for letter, slot in zip(letters, filled):
            prov = state.info.provenance.get(slot)
            kind = prov.kind if prov else "extracted"
            payload.append((letter, slot, state.info.get(slot), kind))
        state.letter_map = {letter: slot for letter, slot, _, _ in payload}
        return payload

    def _act(self, state: SessionState, action: str, payload=None, letter=None) -> SystemAct:
        utterance = self.responder.render(
            action, state.info, payload=payload, letter=letter
        )
        state.last_system_action = action
        ticket = None
        if action == "human_handover" and state.intent == "mathematical":
            ticket = build_handover_ticket(state, self.design)
        return SystemAct(action, utterance, verification_payload=payload,
                         handover_ticket=ticket)

    def _hand_over(self, state: SessionState, reason: str) -> SystemAct:
        state.phase = "handed_over"
        state.outcome = "handover"
        state.handover_reason = reason
        return self._act(state, "human_handover")

    def _final_request(self, state: SessionState) -> SystemAct:
        state.phase = "verifying"
        state.awaiting_slot = None
        return self._act(state, "final_request", payload=self._verification_payload(state))

    def _ask(self, state: SessionState) -> SystemAct:
        action, _rule = next_action(state_of(state.info, self.design), self.design)
        if action is None:
            return self._final_request(state)
        state.awaiting_slot = ASK_SLOT[action]
        return self._act(state, action)

    def _store_ground_truth(self, state: SessionState, slot: str, text: str):
        state.info.set_slot(slot, text.strip(), Provenance("user_ground_truth", state.turn_index))

    def _apply_correction(self, state: SessionState, slot: str, update):
        info = state.info
        if slot == "topic":
            # written directly: the consistency repair in apply_updates
            # would put the old section's chapter straight back; instead a
            # section under a different chapter is dropped and asked again
            prov = Provenance("corrected", state.turn_index, (update.start, update.end))
            info.set_slot("topic", update.value, prov)
            sub = info.subtopic
            if sub is not None and self.catalog.parent_of(sub) != update.value:
                info.clear_slot("subtopic")
            return
        scoped = ExtractionResult(intent=state.intent, slot_updates=[update])
        apply_updates(info, scoped, self.catalog, state.turn_index)
        prov = info.provenance.get(slot)
        if prov is not None:
            info.provenance[slot] = Provenance("corrected", prov.turn, prov.span)

    def _resolve_intent(self, state: SessionState, extraction, ntext):
        """Dialogue-level intent from the first contentful message; slot
        evidence alone implies a mathematical request."""
        intent = extraction.intent
        if intent == "unknown":
            tokens = set(ntext.terms)
            for name, menu_terms in self.rules.menu_tokens.items():
                if tokens & menu_terms:
                    intent = name
                    break
        if intent == "unknown" and extraction.slot_updates:
            intent = "mathematical"
        return intent

    # -- the step function -------------------------------------------------

    def step(self, state: SessionState, text: str) -> SystemAct:
        if state.phase == "handed_over":
            raise RuntimeError(f"session {state.session_id} already handed over")

        ntext = normalize(text, self.norm_cfg)
        extraction = extract(
            text, self.index, self.catalog, self.rules, self.norm_cfg,
            history=[normalize(t, self.norm_cfg) for t in state.history_texts[-10:]],
            params=self.params, awaiting_slot=state.awaiting_slot,
        )
        state.history_texts.append(text)
        act = self._dispatch(state, text, extraction, ntext)
        act.extraction = extraction
        act.turn_index = state.turn_index
        state.turn_index += 1
        return act

    def _dispatch(self, state: SessionState, text: str, extraction, ntext) -> SystemAct:

        if state.phase == "awaiting_exact_question":
            # the free-text summary is what the human tutor receives; a
            # human keyword inside it changes nothing about the outcome
            state.info.set_slot(
                "exact_question", text.strip(),
                Provenance("extracted", state.turn_index, (0, len(text))),
            )
            reason = "human_request" if extraction.human_requested else "ticket_complete"
            if state.intent in ("organizational", "contextual"):
                reason = "summary_provided"
            return self._hand_over(state, reason)

        if extraction.human_requested:
            return self._hand_over(state, "human_request")

        if state.phase == "intent_menu":
            intent = self._resolve_intent(state, extraction, ntext)
            if intent == "unknown":
                state.intent_attempts += 1
                if state.intent_attempts >= MAX_ATTEMPTS:
                    return self._hand_over(state, "unclassified_intent")
                return self._act(state, "unknown_intent_menu")
            state.intent = intent
            return self._route_new_intent(state, extraction)

        if state.phase == "verifying":
            answer = parse_affirmation(ntext, self.rules)
            if answer is True:
                state.phase = "awaiting_exact_question"
                return self._act(state, "exact_question")
            if answer is False:
                state.phase = "correcting"
                state.pending_letter = None
                return self._act(state, "verify_request",
                                 payload=self._verification_payload(state))
            return self._verification_strike(state)

        if state.phase == "correcting":
            if state.pending_letter is None:
                letter = parse_letter(text, state.letter_map)
                if letter is None:
                    return self._verification_strike(state)
                state.pending_letter = letter
                # the next message answers this one slot; give the extractor
                # the same context a direct ask would
                state.awaiting_slot = state.letter_map[letter]
                return self._act(state, "correct_request", letter=letter)
            return self._correction_value(state, text, extraction)

        # collecting
        if state.intent is None:
            state.intent = self._resolve_intent(state, extraction, ntext)
            if state.intent == "unknown":
                state.intent = None
                state.intent_attempts += 1
                if state.intent_attempts >= MAX_ATTEMPTS:
                    return self._hand_over(state, "unclassified_intent")
                state.phase = "intent_menu"
                return self._act(state, "unknown_intent_menu")
            return self._route_new_intent(state, extraction)
        return self._collect(state, text, extraction)

    # -- phase pieces -------------------------------------------------------

    def _route_new_intent(self, state: SessionState, extraction) -> SystemAct:
        if state.intent == "organizational":
            state.phase = "awaiting_exact_question"
            return self._act(state, "org_ack")
        if state.intent == "contextual":
            state.phase = "awaiting_exact_question"
            return self._act(state, "context_ack")
        state.phase = "collecting"
        return self._collect(state, None, extraction)

    def _collect(self, state: SessionState, text, extraction) -> SystemAct:
        apply_updates(state.info, extraction, self.catalog, state.turn_index)
        updated = {u.slot for u in extraction.slot_updates}
        for slot in updated:
            state.fallback_counts.pop(slot, None)
        awaited = state.awaiting_slot
        if (
            text is not None
            and awaited is not None
            and awaited not in updated
            and state.info.get(awaited) is None
        ):
            count = state.fallback_counts.get(awaited, 0) + 1
            state.fallback_counts[awaited] = count
            if count >= MAX_ATTEMPTS:
                self._store_ground_truth(state, awaited, text)
        if is_complete(state.info, self.design):
            return self._final_request(state)
        return self._ask(state)

    def _verification_strike(self, state: SessionState) -> SystemAct:
        count = state.fallback_counts.get("verification", 0) + 1
        state.fallback_counts["verification"] = count
        if count >= MAX_ATTEMPTS:
            return self._hand_over(state, "verification_failed")
        if state.phase == "correcting" and state.pending_letter is None:
            return self._act(state, "verify_request",
                             payload=self._verification_payload(state))
        return self._act(state, "final_request",
                         payload=self._verification_payload(state))

    def _correction_value(self, state: SessionState, text, extraction) -> SystemAct:
        slot = state.letter_map[state.pending_letter]
        update = next((u for u in extraction.slot_updates if u.slot == slot), None)
        if update is not None:
            self._apply_correction(state, slot, update)
            state.pending_letter = None
        else:
            count = state.fallback_counts.get(slot, 0) + 1
            state.fallback_counts[slot] = count
            if count < MAX_ATTEMPTS:
                return self._act(state, "correct_request", letter=state.pending_letter)
            self._store_ground_truth(state, slot, text)
            state.pending_letter = None
        if is_complete(state.info, self.design):
            return self._final_request(state)
        # the correction invalidated other slots (e.g. a mode change that
        # now requires a level) - fall back to collection
        state.phase = "collecting"
        return self._ask(state)


def build_handover_ticket(state: SessionState, design=CURRENT_DESIGN) -> dict:
    """Immutable snapshot forwarded to the tutor queue."""
    complete = is_complete(state.info, design)
    return {
        "session_id": state.session_id,
        "intent": state.intent,
        "slots": state.info.to_dict(),
        "complete": complete,
        "partial": not complete,
        "handover_reason": state.handover_reason,
        "transcript_ref": state.session_id,
    }
