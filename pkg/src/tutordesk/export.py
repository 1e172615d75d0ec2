"""Training-data exports from the dialogue store.

Five line-delimited JSON streams, each with a versioned header line:

* dialogues  -- plain dialogues keyed by dialogue id
* id_dumps   -- the final information dictionary per dialogue
* pairs      -- (question, response) with dialogue and turn indexes
* triples    -- (user request, next action, response)
* ner_spans  -- per-turn entity annotations with character offsets

Records are sorted by dialogue id and turn index so repeated exports of
the same store are byte-identical. Field order inside a record is fixed
by sorted-key serialization. Filters default to completed (handed-over)
dialogues; abandoned ones are flagged by their outcome field when
included.
"""

import json
from dataclasses import dataclass
from pathlib import Path

EXPORT_SCHEMA_VERSION = 1
STREAMS = ("dialogues", "id_dumps", "pairs", "triples", "ner_spans")

# Entity annotations use fixed generic names rather than slot-internal
# ones so that downstream taggers see a stable 7-tag vocabulary
# (the seventh tag, "other", is implicit for unannotated tokens).
GENERIC_ENTITY_NAMES = {
    "topic": "topic",
    "subtopic": "subtopic",
    "exam_mode": "exam_mode",
    "exam_level": "exam_level",
    "question_number": "question_nr",
}
ENTITY_TAGS = ("topic", "subtopic", "exam_mode", "exam_level",
               "question_nr", "intent", "other")


@dataclass
class ExportFilter:
    """Selects which dialogues are exported."""

    outcomes: tuple = ("handover",)
    since: str = None  # inclusive ISO-8601 lower bound on dialogue start
    until: str = None  # exclusive upper bound

    def admits(self, dialogue: dict) -> bool:
        if self.outcomes and dialogue["outcome"] not in self.outcomes:
            return False
        started = (dialogue.get("header") or {}).get("opened_at")
        if self.since and (started is None or started < self.since):
            return False
        if self.until and (started is None or started >= self.until):
            return False
        return True


def select_dialogues(store, flt: ExportFilter = None) -> list:
    """Read and filter dialogues, sorted by dialogue id."""
    flt = flt or ExportFilter()
    out = []
    for did in sorted(set(store.dialogue_ids())):
        d = store.read_dialogue(did)
        if d["turns"] and flt.admits(d):
            out.append(d)
    return out


def _turn_entities(turn: dict, include_intent: bool) -> list:
    entities = []
    for u in turn.get("slot_updates") or []:
        tag = GENERIC_ENTITY_NAMES.get(u["slot"])
        if tag is None or u.get("start") is None:
            continue
        entities.append({
            "tag": tag,
            "start": u["start"],
            "end": u["end"],
            "surface": turn["user_text"][u["start"]:u["end"]],
            "value": u["value"],
        })
    span = turn.get("intent_span")
    if include_intent and span and turn.get("intent"):
        # the intent cue is annotated only on the turn that settled the
        # dialogue intent, and only when it doesn't collide with a slot
        # span — a token carries at most one tag downstream
        disjoint = all(e["end"] <= span[0] or span[1] <= e["start"]
                       for e in entities)
        if disjoint:
            entities.append({
                "tag": "intent",
                "start": span[0],
                "end": span[1],
                "surface": turn["user_text"][span[0]:span[1]],
                "value": turn["intent"],
            })
    entities.sort(key=lambda e: (e["start"], e["end"], e["tag"]))
    return entities


def _final_slots(dialogue: dict) -> dict:
    last = dialogue["turns"][-1]
    info = (last.get("session") or {}).get("info") or {}
    provenance = info.get("provenance") or {}
    return {
        slot: {
            "value": value,
            "provenance": (provenance.get(slot) or {}).get("kind"),
        }
        for slot, value in info.items()
        if slot != "provenance"
    }


def build_records(dialogues: list, stream: str) -> list:
    if stream not in STREAMS:
        raise ValueError(f"unknown export stream: {stream}")
    records = []
    for d in dialogues:
        did = d["dialogue_id"]
        if stream == "dialogues":
            records.append({
                "record": "dialogue",
                "dialogue_id": did,
                "outcome": d["outcome"],
                "turns": [
                    {
                        "turn_index": t["turn_index"],
                        "user_text": t["user_text"],
                        "action": t["action"],
                        "response": t["response"],
                    }
                    for t in d["turns"]
                ],
            })
        elif stream == "id_dumps":
            records.append({
                "record": "id_dump",
                "dialogue_id": did,
                "outcome": d["outcome"],
                "intent": (d["turns"][-1].get("session") or {}).get("intent"),
                "slots": _final_slots(d),
            })
        elif stream == "pairs":
            for t in d["turns"]:
                records.append({
                    "record": "pair",
                    "dialogue_id": did,
                    "turn_index": t["turn_index"],
                    "question": t["user_text"],
                    "response": t["response"],
                })
        elif stream == "triples":
            for t in d["turns"]:
                records.append({
                    "record": "triple",
                    "dialogue_id": did,
                    "turn_index": t["turn_index"],
                    "user_request": t["user_text"],
                    "next_action": t["action"],
                    "response": t["response"],
                })
        elif stream == "ner_spans":
            prev_intent = None
            for t in d["turns"]:
                session_intent = (t.get("session") or {}).get("intent")
                resolved_here = prev_intent is None and session_intent is not None
                records.append({
                    "record": "ner_spans",
                    "dialogue_id": did,
                    "turn_index": t["turn_index"],
                    "user_text": t["user_text"],
                    "entities": _turn_entities(t, include_intent=resolved_here),
                })
                prev_intent = session_intent
    return records


def export_bundle(store, out_dir, formats=STREAMS, flt: ExportFilter = None) -> dict:
    """Write the selected streams to out_dir; returns per-stream paths/counts."""
    for fmt in formats:
        if fmt not in STREAMS:
            raise ValueError(f"unknown export stream: {fmt}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dialogues = select_dialogues(store, flt)
    result = {}
    for stream in STREAMS:
        if stream not in formats:
            continue
        records = build_records(dialogues, stream)
        path = out / f"{stream}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            header = {
                "record": "header",
                "stream": stream,
                "schema": EXPORT_SCHEMA_VERSION,
                "count": len(records),
            }
            fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
        result[stream] = {"path": str(path), "count": len(records)}
    return result


def read_stream(path) -> tuple:
    """Read one export file; returns (header, records). Validates the header."""
    header = None
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if header is None:
                if rec.get("record") != "header":
                    raise ValueError(f"{path}: missing schema header line")
                if rec.get("schema") != EXPORT_SCHEMA_VERSION:
                    raise ValueError(
                        f"{path}: unsupported schema version {rec.get('schema')}"
                    )
                header = rec
                continue
            records.append(rec)
    if header is None:
        raise ValueError(f"{path}: empty export file")
    if header["count"] != len(records):
        raise ValueError(
            f"{path}: header count {header['count']} != {len(records)} records"
        )
    return header, records


def _merge_streams(triples: list, spans: list) -> list:
    span_key = {(r["dialogue_id"], r["turn_index"]): r for r in spans}
    dialogues = {}
    for t in triples:
        d = dialogues.setdefault(t["dialogue_id"], {
            "dialogue_id": t["dialogue_id"], "turns": [],
        })
        key = (t["dialogue_id"], t["turn_index"])
        span_rec = span_key.get(key)
        d["turns"].append({
            "turn_index": t["turn_index"],
            "user_text": t["user_request"],
            "action": t["next_action"],
            "response": t["response"],
            "entities": span_rec["entities"] if span_rec else [],
        })
    for d in dialogues.values():
        d["turns"].sort(key=lambda t: t["turn_index"])
    return [dialogues[k] for k in sorted(dialogues)]


def load_bundle(export_dir) -> list:
    """Rebuild per-dialogue turn data from an exported bundle.

    Needs the triples and ner_spans streams (the training views); returns
    dialogues shaped like {dialogue_id, turns: [{turn_index, user_text,
    action, response, entities}]} sorted by dialogue id.
    """
    export_dir = Path(export_dir)
    _, triples = read_stream(export_dir / "triples.jsonl")
    _, spans = read_stream(export_dir / "ner_spans.jsonl")
    return _merge_streams(triples, spans)


def bundle_dialogues(store, flt: ExportFilter = None) -> list:
    """In-memory equivalent of export_bundle + load_bundle for one store."""
    dialogues = select_dialogues(store, flt)
    triples = build_records(dialogues, "triples")
    spans = build_records(dialogues, "ner_spans")
    return _merge_streams(triples, spans)
