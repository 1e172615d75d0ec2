"""Keyword intent classification and slot extraction.

Extraction layers, in the order they claim tokens: permalink parse,
question-number regexes, explicit chapter references ("Chapter IV"),
examination-mode keywords, level cues, and finally fuzzy catalog search
over whatever tokens remain. Each extracted value carries the character
span of its surface form for the training-data exports.
"""

import json
import re
from dataclasses import dataclass, field
from importlib import resources

from tutordesk.catalog import parse_permalink
from tutordesk.normalizer import normalize, roman_to_int

INTENTS = ("mathematical", "contextual", "organizational", "unknown")
# priority when several keyword groups match at once
_INTENT_PRIORITY = ("mathematical", "contextual", "organizational")

SLOTS = ("topic", "subtopic", "exam_level", "exam_mode", "question_number", "exact_question")
# order in which filled slots are lettered for the verification summary
VERIFICATION_ORDER = ("topic", "subtopic", "exam_mode", "question_number", "exam_level")

MODES = ("training", "exercise", "quiz", "final_examination")
LEVELS = ("chapter", "section")

# "5 a", "5a", "5 (a)", "5.a" - the letter makes these unambiguous anywhere
_QNR_DIGIT_LETTER_RE = re.compile(
    r"\b(\d{1,3})\s*(?:\.\s*|\(\s*)?([a-z])(?:\s*\))?\b(?![\w.])", re.IGNORECASE
)
# "V a", "V (a)" - roman number plus item letter
_QNR_ROMAN_LETTER_RE = re.compile(
    r"\b([ivx]{1,4})\s+(?:\(\s*)?([a-z])(?:\s*\))?\b(?![\w.])", re.IGNORECASE
)
_BARE_NUMBER_RE = re.compile(r"\b(\d{1,3})\b")
_BARE_ROMAN_RE = re.compile(r"\b([ivx]{1,4})\b", re.IGNORECASE)


@dataclass(frozen=True)
class Provenance:
    kind: str  # extracted | user_ground_truth | corrected
    turn: int
    span: tuple = None  # (start, end) into that turn's user text


@dataclass
class InformationDictionary:
    """The six-slot ticket record a dialogue fills."""

    topic: str = None
    subtopic: str = None
    exam_level: str = None
    exam_mode: str = None
    question_number: str = None
    exact_question: str = None
    provenance: dict = field(default_factory=dict)

    def get(self, slot: str):
        return getattr(self, slot)

    def set_slot(self, slot: str, value, prov: Provenance):
        setattr(self, slot, value)
        self.provenance[slot] = prov

    def clear_slot(self, slot: str):
        setattr(self, slot, None)
        self.provenance.pop(slot, None)

    def is_ground_truth(self, slot: str) -> bool:
        prov = self.provenance.get(slot)
        return prov is not None and prov.kind == "user_ground_truth"

    def filled_slots(self):
        return [s for s in SLOTS if self.get(s) is not None]

    def to_dict(self):
        doc = {s: self.get(s) for s in SLOTS}
        doc["provenance"] = {
            s: {"kind": p.kind, "turn": p.turn, "span": list(p.span) if p.span else None}
            for s, p in self.provenance.items()
        }
        return doc

    @classmethod
    def from_dict(cls, doc):
        info = cls(**{s: doc.get(s) for s in SLOTS})
        for slot, p in (doc.get("provenance") or {}).items():
            info.provenance[slot] = Provenance(
                p["kind"], p["turn"], tuple(p["span"]) if p.get("span") else None
            )
        return info


@dataclass(frozen=True)
class SlotUpdate:
    slot: str
    value: str
    start: int
    end: int
    confidence: float


@dataclass
class ExtractionResult:
    intent: str
    slot_updates: list = field(default_factory=list)
    human_requested: bool = False
    intent_span: tuple = None


class IntentRules:
    """Normalized keyword sets loaded from the intents data file."""

    def __init__(self, doc, norm_cfg):
        def norm_set(words):
            out = set()
            for word in words:
                out.update(normalize(word, norm_cfg).terms)
            return frozenset(out)

        self.intent_keywords = {
            name: norm_set(words) for name, words in doc["intents"].items()
        }
        self.menu_tokens = {
            name: norm_set(words) for name, words in doc["menu_tokens"].items()
        }
        self.human_keywords = norm_set(doc["human_keywords"])
        self.affirmations = norm_set(doc["affirmations"])
        self.negations = norm_set(doc["negations"])
        self.level_words = {
            level: norm_set(words) for level, words in doc["level_words"].items()
        }
        self.qnr_triggers = norm_set(doc["question_number_triggers"])
        self.topic_reference_words = norm_set(doc["topic_reference_words"])
        # canonical mode keywords, normalized ("übung" folds into exercise etc.)
        self.mode_keywords = {}
        for mode, words in {
            "training": ["training"],
            "exercise": ["exercise"],
            "quiz": ["quiz"],
            "final_examination": ["exam", "examination", "final"],
        }.items():
            for term in norm_set(words):
                self.mode_keywords[term] = mode


def load_intent_rules(norm_cfg, path=None) -> IntentRules:
    if path is None:
        raw = resources.files("tutordesk.data").joinpath("intents.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    return IntentRules(json.loads(raw), norm_cfg)


def classify_intent(ntext, rules: IntentRules) -> str:
    tokens = set(ntext.terms)
    for intent in _INTENT_PRIORITY:
        if tokens & rules.intent_keywords[intent]:
            return intent
    return "unknown"


def intent_keyword_span(ntext, rules: IntentRules, intent: str):
    if intent not in rules.intent_keywords:
        return None
    for tok in ntext.tokens:
        if tok.normal in rules.intent_keywords[intent]:
            return (tok.start, tok.end)
    return None


def _fold_adjacent_triggers(ntext, rules, span):
    """Fold trigger words ("number", "Aufgabe", ...) that directly precede
    or follow a recognized question number into its span, so they cannot be
    reinterpreted as catalog evidence by the fuzzy search."""
    start, end = span
    while True:
        before = [t for t in ntext.tokens if t.end <= start]
        if before and before[-1].normal in rules.qnr_triggers:
            start = before[-1].start
            continue
        after = [t for t in ntext.tokens if t.start >= end]
        if after and after[0].normal in rules.qnr_triggers:
            end = after[0].end
            continue
        return (start, end)


def extract_question_number(text: str, ntext=None, rules: IntentRules = None,
                            awaiting: bool = False):
    """Recognize question numbers; canonical form is digit(s) + lowercase letter.

    Digit+letter combinations match anywhere; bare numbers only next to a
    trigger word (exercise, task, question, ...) or while the question
    number is the slot being asked for.
    """
    found = _question_number_match(text, ntext, rules, awaiting)
    if found is None:
        return None
    value, span = found
    if ntext is not None and rules is not None:
        span = _fold_adjacent_triggers(ntext, rules, span)
    return value, span


def _question_number_match(text: str, ntext=None, rules: IntentRules = None,
                           awaiting: bool = False):
    match = _QNR_DIGIT_LETTER_RE.search(text)
    if match:
        value = f"{int(match.group(1))}{match.group(2).lower()}"
        return value, (match.start(), match.end())
    match = _QNR_ROMAN_LETTER_RE.search(text)
    if match:
        number = roman_to_int(match.group(1).lower())
        if number is not None:
            value = f"{number}{match.group(2).lower()}"
            return value, (match.start(), match.end())
    if ntext is not None and rules is not None:
        for i, tok in enumerate(ntext.tokens):
            if not tok.normal.isdigit():
                continue
            prev_ok = i > 0 and ntext.tokens[i - 1].normal in rules.qnr_triggers
            next_ok = i + 1 < len(ntext.tokens) and ntext.tokens[i + 1].normal in rules.qnr_triggers
            if prev_ok or next_ok:
                return str(int(tok.normal)), (tok.start, tok.end)
    if awaiting:
        match = _BARE_NUMBER_RE.search(text)
        if match:
            return str(int(match.group(1))), (match.start(), match.end())
        match = _BARE_ROMAN_RE.search(text)
        # a lone "I" is almost always the pronoun, never question number 1
        if match and match.group(1).lower() != "i":
            number = roman_to_int(match.group(1).lower())
            if number is not None:
                return str(number), (match.start(), match.end())
    return None


def extract_level(ntext, rules: IntentRules, awaiting: bool = False):
    """Level cues: free answers only while the level question is open;
    otherwise an explicit "<level> level" phrase is required."""
    tokens = [t.normal for t in ntext.tokens]
    if awaiting:
        found = []
        for level, words in rules.level_words.items():
            for tok in ntext.tokens:
                if tok.normal in words:
                    found.append((level, (tok.start, tok.end)))
                    break
        if len(found) == 1:
            return found[0]
        return None
    for i, tok in enumerate(ntext.tokens):
        if tok.normal != "level":
            continue
        for level, words in rules.level_words.items():
            if i > 0 and tokens[i - 1] in words:
                prev = ntext.tokens[i - 1]
                return level, (prev.start, tok.end)
    return None


def extract_topic_reference(ntext, catalog, rules: IntentRules):
    """Explicit chapter references: a topic word followed by its number
    ("Chapter IV" arrives here as ["chapter", "4"])."""
    for i, tok in enumerate(ntext.tokens):
        if tok.normal not in rules.topic_reference_words:
            continue
        if i + 1 >= len(ntext.tokens):
            continue
        nxt = ntext.tokens[i + 1]
        if not nxt.normal.isdigit():
            continue
        entry = catalog.by_ordinal.get(int(nxt.normal))
        if entry is not None:
            return entry.entry_id, (tok.start, nxt.end)
    return None


def extract_mode_keyword(ntext, rules: IntentRules):
    for tok in ntext.tokens:
        mode = rules.mode_keywords.get(tok.normal)
        if mode is not None:
            return mode, (tok.start, tok.end)
    return None


def _span_for_terms(ntext, terms):
    """Covering span of the tokens whose normal form is in `terms`."""
    positions = [t for t in ntext.tokens if t.normal in terms]
    if not positions:
        return None
    return (min(t.start for t in positions), max(t.end for t in positions))


def extract(text: str, index, catalog, rules: IntentRules, norm_cfg,
            history=(), params=None, awaiting_slot: str = None) -> ExtractionResult:
    """Full extraction for one user message.

    `history` is the list of earlier user messages (oldest first), used to
    give fuzzy search context when the current message alone is too short.
    `awaiting_slot` is the slot the system just asked for, which widens
    what counts as an answer (bare numbers, bare level words).
    """
    ntext = normalize(text, norm_cfg)
    tokens = set(ntext.terms)

    if tokens & rules.human_keywords:
        # an explicit human request overrides everything else in the message
        return ExtractionResult(intent=classify_intent(ntext, rules), human_requested=True)

    intent = classify_intent(ntext, rules)
    result = ExtractionResult(intent=intent, intent_span=intent_keyword_span(ntext, rules, intent))
    updates = {}
    consumed = set()  # token spans claimed by non-fuzzy extractors

    link = parse_permalink(text, catalog)
    if link:
        span = link.pop("_span")
        for slot, value in link.items():
            updates[slot] = SlotUpdate(slot, value, span[0], span[1], 1.0)
        consumed.add(span)

    qnr = extract_question_number(
        text, ntext, rules, awaiting=awaiting_slot == "question_number"
    )
    if qnr and "question_number" not in updates:
        value, span = qnr
        updates["question_number"] = SlotUpdate("question_number", value, span[0], span[1], 1.0)
        consumed.add(span)

    topic_ref = extract_topic_reference(ntext, catalog, rules)
    if topic_ref and "topic" not in updates:
        value, span = topic_ref
        updates["topic"] = SlotUpdate("topic", value, span[0], span[1], 1.0)
        consumed.add(span)

    mode = extract_mode_keyword(ntext, rules)
    if mode and "exam_mode" not in updates:
        value, span = mode
        updates["exam_mode"] = SlotUpdate("exam_mode", value, span[0], span[1], 1.0)
        consumed.add(span)

    level = extract_level(ntext, rules, awaiting=awaiting_slot == "exam_level")
    if level and "exam_level" not in updates:
        value, span = level
        updates["exam_level"] = SlotUpdate("exam_level", value, span[0], span[1], 1.0)
        consumed.add(span)

    _fuzzy_slots(ntext, index, catalog, history, params, updates, consumed,
                 awaiting_slot)

    result.slot_updates = [updates[s] for s in SLOTS if s in updates]
    return result


def _overlaps(tok, spans):
    return any(tok.start < end and start < tok.end for start, end in spans)


def _fuzzy_slots(ntext, index, catalog, history, params, updates, consumed,
                 awaiting_slot=None):
    """Resolve topic/subtopic (and mode, as fallback) via fuzzy search over
    the tokens no other extractor claimed."""
    query_tokens = [t for t in ntext.tokens if not _overlaps(t, consumed)]
    if not query_tokens:
        return
    current_terms = [t.normal for t in query_tokens]
    weighted = [(t, 1.0) for t in current_terms]
    search_params = params or index.params
    n = len(history)
    for idx, past in enumerate(history):
        age = n - 1 - idx
        weight = search_params.history_weight * (search_params.history_decay ** age)
        weighted.extend((t, weight) for t in past.terms)
    hits = index.search_weighted(weighted, search_params)

    def current_matches(hit):
        return [m for m in hit.matched_terms if m[0] in set(current_terms)]

    def best_unambiguous(candidates, kind, accept):
        """Top hit of the kind, or None when the runner-up ties it on both
        score and coverage: a full tie has no most-probable entry, so
        nothing is assigned and the dialogue asks instead of guessing."""
        best = None
        for hit in candidates:
            if hit.kind != kind or not accept(hit):
                continue
            if best is None:
                best = hit
            else:
                if (abs(hit.score - best.score) < 1e-9
                        and abs(hit.coverage - best.coverage) < 1e-9):
                    return None
                break
        return best

    topic_hit = None
    if "topic" not in updates:
        topic_hit = best_unambiguous(hits, "topic", current_matches)

    if topic_hit is not None:
        # a section title can contain a chapter's words ("Linear Equations"
        # inside "Linear Systems of Equations").  When the best section
        # explains every word the chapter matched and scores at least as
        # well, the user named the section; keep the chapter only on exact
        # ties outside a section question, where the broader reading is the
        # safer one.
        sub_best = best_unambiguous(hits, "subtopic", current_matches)
        if sub_best is not None:
            topic_terms = {m[0] for m in current_matches(topic_hit)}
            sub_terms = {m[0] for m in current_matches(sub_best)}
            stronger = sub_best.score > topic_hit.score + 1e-9
            tied = abs(sub_best.score - topic_hit.score) < 1e-9
            if sub_terms >= topic_terms and (
                    stronger or (tied and awaiting_slot == "subtopic")):
                topic_hit = None

    if topic_hit is not None:
        span = _span_for_terms(ntext, {m[0] for m in current_matches(topic_hit)})
        if span:
            updates["topic"] = SlotUpdate("topic", topic_hit.entry_id, span[0], span[1], topic_hit.score)

    if "subtopic" not in updates:
        # terms that served as evidence for the chosen topic (exact or
        # misspelled) cannot double as evidence for a section; rescore
        # subtopics without them
        exact_topic_terms = set()
        topic_id = None
        if "topic" in updates:
            topic_id = updates["topic"].value
        elif topic_hit is not None:
            topic_id = topic_hit.entry_id
        if topic_id is not None and topic_id in index.entry_terms:
            topic_terms = index.entry_terms[topic_id]
            exact_topic_terms = {t for t in current_terms if t in topic_terms}
        if topic_hit is not None:
            exact_topic_terms |= {m[0] for m in current_matches(topic_hit)}
        sub_weighted = [(t, w) for t, w in weighted if t not in exact_topic_terms]
        sub_current = [t for t in current_terms if t not in exact_topic_terms]
        if sub_current:
            sub_hits = index.search_weighted(sub_weighted, search_params)

            def sub_matches(hit):
                return [m for m in hit.matched_terms if m[0] in set(sub_current)]

            if topic_id is not None:
                # a section named alongside its chapter can only be one of
                # that chapter's own sections; a stray match under another
                # chapter is noise and must not override the named chapter
                children = [
                    h for h in sub_hits
                    if h.kind == "subtopic" and catalog.parent_of(h.entry_id) == topic_id
                ]
                sub_hit = best_unambiguous(children, "subtopic", sub_matches)
            else:
                sub_hit = best_unambiguous(sub_hits, "subtopic", sub_matches)
            if sub_hit is not None:
                span = _span_for_terms(ntext, {m[0] for m in sub_matches(sub_hit)})
                if span:
                    updates["subtopic"] = SlotUpdate(
                        "subtopic", sub_hit.entry_id, span[0], span[1], sub_hit.score
                    )

    if "exam_mode" not in updates:
        mode_hit = best_unambiguous(hits, "exam_mode", current_matches)
        if mode_hit is not None:
            entry = catalog.by_id[mode_hit.entry_id]
            span = _span_for_terms(ntext, {m[0] for m in current_matches(mode_hit)})
            if span:
                updates["exam_mode"] = SlotUpdate(
                    "exam_mode", entry.value, span[0], span[1], mode_hit.score
                )


def apply_updates(info: InformationDictionary, result: ExtractionResult,
                  catalog, turn: int) -> InformationDictionary:
    """Write extracted values into the ID; newest information wins.

    Consistency repairs: a subtopic under a different chapter replaces the
    stored chapter with its parent; a mode that contradicts the stored
    level clears the level (final examination is a chapter-level matter,
    the quiz a section-level one).
    """
    for update in result.slot_updates:
        prov = Provenance("extracted", turn, (update.start, update.end))
        info.set_slot(update.slot, update.value, prov)

    if info.subtopic is not None and not info.is_ground_truth("subtopic"):
        parent = catalog.parent_of(info.subtopic)
        if parent is not None and info.topic != parent:
            info.set_slot("topic", parent, info.provenance["subtopic"])

    if info.exam_mode == "final_examination" and info.exam_level == "section":
        info.clear_slot("exam_level")
    if info.exam_mode == "quiz" and info.exam_level == "chapter":
        info.clear_slot("exam_level")
    return info


def parse_affirmation(ntext, rules: IntentRules):
    """True / False for a yes-no answer, None when undecidable."""
    tokens = set(ntext.terms)
    yes = bool(tokens & rules.affirmations)
    no = bool(tokens & rules.negations)
    if yes and not no:
        return True
    if no and not yes:
        return False
    return None
