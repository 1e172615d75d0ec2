"""Append-only dialogue persistence.

One JSON-lines file per dialogue (header record, one record per turn
carrying a full session snapshot, close record on handover) plus a
store-wide index file of open/close events. A turn is flushed and synced
before the caller gets its response back, so an acknowledged turn
survives a process crash; a dialogue whose file never received a close
record reads back as abandoned.
"""

import json
import os
from pathlib import Path

SCHEMA_VERSION = 1


class DialogueStore:
    def __init__(self, root):
        self.root = Path(root)
        self.dialogue_dir = self.root / "dialogues"
        self.dialogue_dir.mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.jsonl"

    def _path(self, dialogue_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in dialogue_id)
        return self.dialogue_dir / f"{safe}.jsonl"

    def _append(self, path: Path, record: dict):
        line = json.dumps(record, ensure_ascii=False, sort_keys=True)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _index_event(self, event: str, dialogue_id: str, at):
        self._append(self.index_path, {
            "record": "index", "schema": SCHEMA_VERSION,
            "event": event, "dialogue_id": dialogue_id, "at": at,
        })

    # -- writing ------------------------------------------------------------

    def begin(self, dialogue_id: str, locale: str, opened_at):
        path = self._path(dialogue_id)
        if path.exists():
            raise ValueError(f"dialogue {dialogue_id!r} already exists")
        self._append(path, {
            "record": "dialogue", "schema": SCHEMA_VERSION,
            "dialogue_id": dialogue_id, "locale": locale, "opened_at": opened_at,
        })
        self._index_event("opened", dialogue_id, opened_at)

    def append_turn(self, dialogue_id: str, turn: dict):
        record = {"record": "turn", "schema": SCHEMA_VERSION,
                  "dialogue_id": dialogue_id}
        record.update(turn)
        self._append(self._path(dialogue_id), record)

    def close(self, dialogue_id: str, outcome: str, reason, ticket, closed_at):
        self._append(self._path(dialogue_id), {
            "record": "close", "schema": SCHEMA_VERSION,
            "dialogue_id": dialogue_id, "outcome": outcome,
            "handover_reason": reason, "ticket": ticket, "closed_at": closed_at,
        })
        self._index_event("closed", dialogue_id, closed_at)

    # -- reading ------------------------------------------------------------

    def exists(self, dialogue_id: str) -> bool:
        return self._path(dialogue_id).exists()

    def _read_records(self, path: Path) -> list:
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError:
                    # torn tail write from a crash; everything before it
                    # was synced and acknowledged
                    break
        return records

    def read_dialogue(self, dialogue_id: str) -> dict:
        path = self._path(dialogue_id)
        if not path.exists():
            raise KeyError(dialogue_id)
        header, turns, close = None, [], None
        for record in self._read_records(path):
            if record["record"] == "dialogue":
                header = record
            elif record["record"] == "turn":
                turns.append(record)
            elif record["record"] == "close":
                close = record
        if header is None:
            raise ValueError(f"dialogue file for {dialogue_id!r} lacks its header")
        outcome = close["outcome"] if close else "abandoned"
        return {"dialogue_id": dialogue_id, "header": header,
                "turns": turns, "close": close, "outcome": outcome}

    def load_snapshot(self, dialogue_id: str):
        """Latest persisted session snapshot, None for a fresh dialogue."""
        if not self.exists(dialogue_id):
            return None
        dialogue = self.read_dialogue(dialogue_id)
        if not dialogue["turns"]:
            return {"_fresh": True, "locale": dialogue["header"].get("locale")}
        return dialogue["turns"][-1]["session"]

    def dialogue_ids(self) -> list:
        """All dialogue ids, in open order (from the index, deduplicated)."""
        ids, seen = [], set()
        if self.index_path.exists():
            for record in self._read_records(self.index_path):
                did = record.get("dialogue_id")
                if record.get("event") == "opened" and did not in seen:
                    seen.add(did)
                    ids.append(did)
        for path in sorted(self.dialogue_dir.glob("*.jsonl")):
            did = path.stem
            if did not in seen:
                seen.add(did)
                ids.append(did)
        return ids
