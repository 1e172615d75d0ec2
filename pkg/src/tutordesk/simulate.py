"""Deterministic self-chat corpus generation.

Samples a dialogue plan (intent, catalog entries, phrasing styles, typo
and correction behaviour) from a seeded RNG, then plays the user side
against a real engine, recording the engine's actual actions as the
scenario expectations. The result is a scenario corpus that passes by
construction plus, when a storage path is given, a store of dialogue
records for the training-data pipeline.
"""

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

from .config import EngineConfig
from .engine import Engine
from .harness import Scenario, ScenarioStep
from .normalizer import int_to_roman

MAX_USER_TURNS = 15


def load_phrasings(path=None) -> dict:
    if path is None:
        ref = resources.files("tutordesk.data") / "phrasings.json"
        return json.loads(ref.read_text(encoding="utf-8"))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class Plan:
    kind: str                   # math | org | context | human_early | menu_strikeout
    open_style: str = None      # full | topic_mode | topic_only | mode_qnr | greeting | permalink
    topic: object = None        # catalog entry
    subtopic: object = None     # catalog entry or None
    mode: str = None
    level: str = None           # chapter | section | None
    qnr_text: str = None        # surface form, e.g. "5 (a)"
    qnr_value: str = None       # canonical, e.g. "5a"
    typo_edits: int = 0
    noise_slots: dict = field(default_factory=dict)  # action -> noise replies left
    correction: bool = False
    correction_state: str = None  # None -> negated -> lettered -> done
    human_after: int = None       # hand over after this many user turns
    menu_strikes: int = 0


def _inject_typo(word: str, rng: random.Random, prefix: int = 2) -> str:
    """One random character edit at a position past the fuzzy prefix."""
    if len(word) < prefix + 3:
        return word
    pos = rng.randrange(prefix + 1, len(word))
    op = rng.choice(("sub", "del", "ins"))
    alphabet = "abcdefghijklmnopqrstuvwxyz"
    if op == "sub":
        repl = rng.choice([c for c in alphabet if c != word[pos].lower()])
        return word[:pos] + repl + word[pos + 1:]
    if op == "del":
        return word[:pos] + word[pos + 1:]
    return word[:pos] + rng.choice(alphabet) + word[pos:]


def _typo_text(text: str, rng: random.Random, edits: int) -> str:
    words = text.split()
    candidates = [i for i, w in enumerate(words) if len(w) >= 5 and w.isalpha()]
    if not candidates or edits <= 0:
        return text
    idx = rng.choice(candidates)
    word = words[idx]
    for _ in range(edits):
        word = _inject_typo(word, rng)
    words[idx] = word
    return " ".join(words)


class UserSimulator:
    def __init__(self, plan: Plan, catalog, rng: random.Random, phrasings: dict):
        self.plan = plan
        self.catalog = catalog
        self.rng = rng
        self.phr = phrasings

    def _pick(self, key: str) -> str:
        return self.rng.choice(self.phr[key])

    def _mode_word(self, english=True) -> str:
        table = self.phr["mode_words" if english else "mode_words_de"]
        return self.rng.choice(table[self.plan.mode])

    def _fill(self, template: str) -> str:
        plan = self.plan
        values = {}
        if "{mode_word}" in template:
            values["mode_word"] = self._mode_word()
        if "{mode_word_de}" in template:
            values["mode_word_de"] = self._mode_word(english=False)
        if "{qnr}" in template:
            values["qnr"] = plan.qnr_text
        if "{roman}" in template:
            values["roman"] = int_to_roman(plan.topic.ordinal).upper()
        if "{ordinal}" in template:
            values["ordinal"] = str(plan.topic.ordinal)
        if "{title}" in template:
            values["title"] = plan.topic.title
        if "{synonym}" in template:
            synonyms = list(plan.topic.synonyms) or [plan.topic.title]
            values["synonym"] = self.rng.choice(synonyms)
        if "{permalink}" in template:
            values["permalink"] = self._permalink()
        return template.format(**values)

    def _permalink(self) -> str:
        plan = self.plan
        host = self.catalog.permalink_hosts[0]
        mode_slug = self.catalog.permalink_mode_slugs[plan.mode]
        url = f"https://{host}/course/{plan.topic.slug}/{mode_slug}"
        if self.rng.random() < 0.5 and plan.qnr_value:
            url += f"/{plan.qnr_value}"
        return url

    def opening(self) -> str:
        plan = self.plan
        if plan.kind == "org":
            return self._pick("org_openers")
        if plan.kind == "context":
            return self._pick("context_openers")
        if plan.kind in ("menu_strikeout",) or plan.open_style == "greeting":
            return self._pick("greetings")
        template = self._pick("openers_" + plan.open_style)
        text = self._fill(template)
        if plan.typo_edits and plan.open_style in ("topic_only", "topic_mode"):
            text = _typo_text(text, self.rng, plan.typo_edits)
        return text

    def _entry_answer(self, key: str, entry) -> str:
        template = self._pick(key)
        values = {}
        if "{title}" in template:
            values["title"] = entry.title
        if "{synonym}" in template:
            synonyms = list(entry.synonyms) or [entry.title]
            values["synonym"] = self.rng.choice(synonyms)
        if "{roman}" in template:
            values["roman"] = int_to_roman(entry.ordinal).upper()
        if "{ordinal}" in template:
            values["ordinal"] = str(entry.ordinal)
        text = template.format(**values)
        if self.plan.typo_edits:
            text = _typo_text(text, self.rng, self.plan.typo_edits)
        return text

    def _noise_due(self, action: str) -> bool:
        left = self.plan.noise_slots.get(action, 0)
        if left > 0:
            self.plan.noise_slots[action] = left - 1
            return True
        return False

    def respond(self, act) -> str:
        plan = self.plan
        action = act.action

        if action == "unknown_intent_menu":
            if plan.kind == "menu_strikeout":
                plan.menu_strikes += 1
                return self._pick("noise")
            return self._pick("menu_answers_math")

        if action in ("org_ack", "context_ack", "exact_question"):
            return self._pick("summaries")

        if action.startswith("ask_") and self._noise_due(action):
            return self._pick("noise")

        if action == "ask_topic":
            return self._entry_answer("topic_answers", plan.topic)
        if action == "ask_exam_mode":
            return self._fill(self._pick("mode_answers"))
        if action == "ask_level":
            key = "level_answers_section" if plan.level == "section" else "level_answers_chapter"
            return self._pick(key)
        if action == "ask_subtopic":
            return self._entry_answer("subtopic_answers", plan.subtopic)
        if action == "ask_question_number":
            return self._pick("qnr_answers").format(qnr=plan.qnr_text)

        if action == "final_request":
            if plan.correction and plan.correction_state is None:
                plan.correction_state = "negated"
                return self._pick("negations")
            return self._pick("affirmations")
        if action == "verify_request":
            target = None
            for letter, slot, _value, _kind in act.verification_payload or []:
                if slot == "question_number":
                    target = letter
                    break
            if target is None and act.verification_payload:
                target = act.verification_payload[0][0]
            plan.correction_state = "lettered"
            return target or "a"
        if action == "correct_request":
            plan.correction_state = "done"
            n = self.rng.randrange(1, 10)
            letter = self.rng.choice("abcde")
            plan.qnr_value = f"{n}{letter}"
            return f"{n} {letter}"

        return self._pick("noise")


def sample_plan(rng: random.Random, catalog, design) -> Plan:
    kind = rng.choices(
        ("math", "org", "context", "human_early", "menu_strikeout"),
        weights=(80, 6, 5, 5, 4),
    )[0]
    plan = Plan(kind=kind)
    if kind in ("org", "context"):
        return plan
    if kind == "menu_strikeout":
        return plan

    plan.topic = rng.choice(catalog.topics)
    subtopics = sorted(
        catalog.subtopics_of(plan.topic.entry_id), key=lambda e: e.entry_id
    )
    plan.mode = rng.choice(design.modes)
    levels = design.levels_of(plan.mode)
    if plan.mode in design.section_scoped_modes:
        plan.level = None
        plan.subtopic = rng.choice(subtopics) if subtopics else None
    elif len(levels) >= 2:
        plan.level = rng.choice(levels)
        if plan.level == "section":
            plan.subtopic = rng.choice(subtopics) if subtopics else None
    n = rng.randrange(1, 13)
    letter = rng.choice("abcde")
    fmt = rng.choice(("{n} {l}", "{n}{l}", "{n} ({l})", "{n}.{l}", "{n}"))
    plan.qnr_text = fmt.format(n=n, l=letter)
    plan.qnr_value = f"{n}{letter}" if "{l}" in fmt else str(n)

    if kind == "human_early":
        plan.open_style = rng.choice(("greeting", "topic_only"))
        plan.human_after = rng.randrange(1, 4)
        return plan

    plan.open_style = rng.choices(
        ("full", "topic_mode", "topic_only", "mode_qnr", "greeting", "permalink"),
        weights=(16, 16, 24, 8, 24, 12),
    )[0]
    # bare-number openers need the letterless canonical form to stay truthful
    if plan.open_style in ("full", "mode_qnr") and "{l}" not in fmt:
        plan.qnr_text = f"{n} {letter}"
        plan.qnr_value = f"{n}{letter}"
    if rng.random() < 0.22:
        plan.typo_edits = rng.choices((1, 2), weights=(3, 1))[0]
    if rng.random() < 0.20:
        plan.correction = True
    if rng.random() < 0.26:
        noisy_action = rng.choice(
            ("ask_topic", "ask_exam_mode", "ask_question_number", "ask_subtopic")
        )
        plan.noise_slots[noisy_action] = 1
    return plan


def make_clock(start: str = "2026-02-01T00:00:00+00:00"):
    base = datetime.fromisoformat(start)
    counter = [0]

    def clock() -> str:
        at = base + timedelta(seconds=counter[0])
        counter[0] += 1
        return at.strftime("%Y-%m-%dT%H:%M:%SZ")

    return clock


def run_plan(engine: Engine, session_id: str, plan: Plan, rng, phrasings) -> Scenario:
    sim = UserSimulator(plan, engine.catalog, rng, phrasings)
    steps = []
    message = sim.opening()
    opening = message
    user_turns = 1
    while True:
        act = engine.handle_message(session_id, message)
        if act.action == "human_handover":
            steps.append(ScenarioStep(act.action, None, None))
            break
        if plan.human_after is not None and user_turns >= plan.human_after:
            reply = rng.choice(phrasings["human_requests"])
        elif user_turns >= MAX_USER_TURNS - 1:
            # out of budget: close the dialogue the way a tired user would
            reply = rng.choice(phrasings["human_requests"])
        else:
            reply = sim.respond(act)
        steps.append(ScenarioStep(act.action, None, reply))
        message = reply
        user_turns += 1
    return Scenario(
        scenario_id=session_id,
        opening=opening,
        steps=steps,
        terminal={"outcome": "handover"},
    )


def generate_corpus(n: int = 300, seed: int = 7, phrasings_path=None,
                    storage_path=None, locale: str = "en") -> dict:
    phrasings = load_phrasings(phrasings_path)
    rng = random.Random(seed)
    config = EngineConfig(storage_path=storage_path, locale=locale)
    engine = Engine(config, clock=make_clock())
    scenarios = []
    user_turns = []
    action_counts = {}
    for i in range(n):
        plan = sample_plan(rng, engine.catalog, engine.design)
        sid = f"d{i:04d}"
        engine.new_session(sid)
        scenario = run_plan(engine, sid, plan, rng, phrasings)
        scenarios.append(scenario)
        user_turns.append(len(scenario.steps))
        for step in scenario.steps:
            action_counts[step.expect_action] = action_counts.get(step.expect_action, 0) + 1
    stats = {
        "dialogues": n,
        "user_turns": sum(user_turns),
        "avg_user_turns": round(sum(user_turns) / n, 2) if n else 0.0,
        "max_user_turns": max(user_turns) if user_turns else 0,
        "action_counts": dict(sorted(action_counts.items())),
    }
    return {"scenarios": scenarios, "stats": stats}
