"""Labeled datasets derived from logged dialogues.

Every stored user turn becomes one example: its tokens, the previous
system action (a start sentinel on the opening turn), the action the
engine actually took as the next-action label, and per-token entity
tags projected from the logged character spans. No manual labeling is
involved -- the rule engine is the annotator.

Splits are assigned per dialogue so that no conversation straddles
train and test; the default split takes 200/50/50 dialogues when at
least 300 are available and keeps those proportions otherwise.
"""

import json
import random
import re
from dataclasses import dataclass, field

from tutordesk.export import ENTITY_TAGS
from tutordesk.policy import ACTIONS

START_ACTION = "<start>"
DEFAULT_SPLIT = (200, 50, 50)
MIN_DIALOGUES = 30

_WORD_RE = re.compile(r"\w+", re.UNICODE)
_WORD_OR_PUNCT_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass
class TokenizerConfig:
    """Ablation switches for example construction.

    ``lowercase`` folds case (the capitalized/cased setting is the
    default); ``keep_punctuation`` emits punctuation marks as their own
    tokens instead of dropping them.
    """

    lowercase: bool = False
    keep_punctuation: bool = False

    def to_dict(self) -> dict:
        return {"lowercase": self.lowercase,
                "keep_punctuation": self.keep_punctuation}

    @classmethod
    def from_dict(cls, data: dict) -> "TokenizerConfig":
        return cls(**data)


def tokenize(text: str, config: TokenizerConfig = None) -> list:
    """Split text into (token, start, end) triples with char offsets."""
    config = config or TokenizerConfig()
    pattern = _WORD_OR_PUNCT_RE if config.keep_punctuation else _WORD_RE
    out = []
    for m in pattern.finditer(text):
        tok = m.group(0)
        if config.lowercase:
            tok = tok.lower()
        out.append((tok, m.start(), m.end()))
    return out


@dataclass
class Example:
    """One user turn with its gold labels."""

    dialogue_id: str
    turn_index: int
    tokens: list  # token strings
    spans: list  # (start, end) per token, into the raw user text
    tags: list  # entity tag per token, from ENTITY_TAGS
    action: str  # next-action label
    prev_action: str  # previous system action or START_ACTION
    text: str = ""

    def to_dict(self) -> dict:
        return {
            "dialogue_id": self.dialogue_id,
            "turn_index": self.turn_index,
            "tokens": list(self.tokens),
            "spans": [list(s) for s in self.spans],
            "tags": list(self.tags),
            "action": self.action,
            "prev_action": self.prev_action,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Example":
        return cls(
            dialogue_id=data["dialogue_id"],
            turn_index=data["turn_index"],
            tokens=list(data["tokens"]),
            spans=[tuple(s) for s in data["spans"]],
            tags=list(data["tags"]),
            action=data["action"],
            prev_action=data["prev_action"],
            text=data.get("text", ""),
        )


@dataclass
class LabeledDataset:
    """Examples grouped into disjoint-by-dialogue train/eval/test splits."""

    splits: dict = field(default_factory=dict)  # name -> list of Example
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    actions: tuple = ACTIONS
    tags: tuple = ENTITY_TAGS

    def examples(self, split: str) -> list:
        return self.splits.get(split, [])

    def dialogue_ids(self, split: str) -> set:
        return {ex.dialogue_id for ex in self.examples(split)}

    def to_dict(self) -> dict:
        return {
            "tokenizer": self.tokenizer.to_dict(),
            "actions": list(self.actions),
            "tags": list(self.tags),
            "splits": {
                name: [ex.to_dict() for ex in exs]
                for name, exs in self.splits.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledDataset":
        return cls(
            splits={
                name: [Example.from_dict(e) for e in exs]
                for name, exs in data["splits"].items()
            },
            tokenizer=TokenizerConfig.from_dict(data["tokenizer"]),
            actions=tuple(data["actions"]),
            tags=tuple(data["tags"]),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, indent=2)

    @classmethod
    def load(cls, path) -> "LabeledDataset":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _token_tags(tokens: list, entities: list) -> list:
    """Project character-span annotations onto tokens.

    A token overlapping an entity span takes that entity's tag; tokens
    inside a multi-word span therefore tag contiguously. Everything else
    is ``other`` -- including values the engine stored verbatim without
    a span (ground-truth fallbacks).
    """
    tags = []
    for _tok, start, end in tokens:
        tag = "other"
        for ent in entities:
            if start < ent["end"] and ent["start"] < end:
                tag = ent["tag"]
                break
        tags.append(tag)
    return tags


def _split_sizes(n: int, ratios: tuple) -> tuple:
    """Dialogue counts per split: exact when the corpus covers the
    requested sizes, proportional otherwise (train gets the remainder)."""
    total = sum(ratios)
    if n >= total:
        return tuple(ratios)
    evl = round(n * ratios[1] / total)
    test = round(n * ratios[2] / total)
    train = n - evl - test
    return (train, evl, test)


def build_dataset(dialogues: list, ratios: tuple = DEFAULT_SPLIT,
                  tokenizer: TokenizerConfig = None, seed: int = 0) -> LabeledDataset:
    """Build train/eval/test examples from bundle-shaped dialogues.

    ``dialogues`` is the shape produced by export.load_bundle or
    export.bundle_dialogues: {dialogue_id, turns: [{turn_index,
    user_text, action, entities, ...}]}. Fewer than 30 dialogues is
    too small to split meaningfully and is refused.
    """
    tokenizer = tokenizer or TokenizerConfig()
    if len(dialogues) < MIN_DIALOGUES:
        raise ValueError(
            f"need at least {MIN_DIALOGUES} dialogues to build a dataset, "
            f"got {len(dialogues)}; generate a larger corpus first"
        )
    ids = sorted(d["dialogue_id"] for d in dialogues)
    if len(set(ids)) != len(ids):
        raise ValueError("dialogue ids are not unique across the corpus")
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_train, n_eval, n_test = _split_sizes(len(ids), ratios)
    assignment = {}
    for i, did in enumerate(ids):
        if i < n_train:
            assignment[did] = "train"
        elif i < n_train + n_eval:
            assignment[did] = "eval"
        elif i < n_train + n_eval + n_test:
            assignment[did] = "test"
        # dialogues beyond the requested sizes are left out entirely

    splits = {"train": [], "eval": [], "test": []}
    for d in sorted(dialogues, key=lambda d: d["dialogue_id"]):
        split = assignment.get(d["dialogue_id"])
        if split is None:
            continue
        prev_action = START_ACTION
        for turn in d["turns"]:
            toks = tokenize(turn["user_text"], tokenizer)
            splits[split].append(Example(
                dialogue_id=d["dialogue_id"],
                turn_index=turn["turn_index"],
                tokens=[t[0] for t in toks],
                spans=[(t[1], t[2]) for t in toks],
                tags=_token_tags(toks, turn.get("entities") or []),
                action=turn["action"],
                prev_action=prev_action,
                text=turn["user_text"],
            ))
            prev_action = turn["action"]
    return LabeledDataset(splits=splits, tokenizer=tokenizer)
