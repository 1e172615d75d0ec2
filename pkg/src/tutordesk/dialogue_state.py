"""Slot-presence state machine behind the dialogue policy.

A dialogue state is the set of "already known" flags over the ticket
slots. Validity rules say which flag combinations are coherent (at most
one examination mode, levels only for modes that distinguish levels, ...)
and an ordered rule list maps every valid state to the next question to
ask. The full transition table is generated from these rules, so design
variants (an extra hierarchy layer, chapter-only courses) regenerate
their tables instead of hand-editing them.
"""

import hashlib
import itertools
from dataclasses import dataclass, field

from tutordesk.nlu import InformationDictionary


@dataclass(frozen=True)
class DesignConfig:
    """Describes a slot-filling design: which examination modes exist,
    which levels each mode distinguishes, and which modes always attach
    their content to sections (a quiz belongs to a section even though
    the level question is never asked for it)."""

    modes: tuple = ("training", "exercise", "quiz", "final_examination")
    mode_levels: tuple = (
        ("training", ("chapter", "section")),
        ("exercise", ("chapter", "section")),
        ("quiz", ()),
        ("final_examination", ()),
    )
    section_scoped_modes: tuple = ("quiz",)
    deep_hierarchy: bool = False  # adds a sub-sub-topic layer below sections

    def __post_init__(self):
        declared = {m for m, _ in self.mode_levels}
        if declared != set(self.modes):
            raise ValueError("mode_levels must cover exactly the declared modes")
        for m in self.section_scoped_modes:
            if m not in self.modes:
                raise ValueError(f"unknown section-scoped mode {m!r}")

    def levels_of(self, mode: str) -> tuple:
        for m, levels in self.mode_levels:
            if m == mode:
                return levels
        return ()

    @property
    def levels(self) -> tuple:
        seen = []
        for _, levels in self.mode_levels:
            for lvl in levels:
                if lvl not in seen:
                    seen.append(lvl)
        return tuple(seen)

    @property
    def flag_names(self) -> tuple:
        names = ["topic", "sub_topic"]
        if self.deep_hierarchy:
            names.append("sub_sub_topic")
        names.extend(self.modes)
        names.extend(f"{lvl}_level" for lvl in self.levels)
        names.append("question_number")
        return tuple(names)


CURRENT_DESIGN = DesignConfig()
LEGACY_DESIGN = DesignConfig(deep_hierarchy=True)


@dataclass(frozen=True)
class StateVector:
    """An immutable set of presence flags."""

    flags: frozenset

    @classmethod
    def of(cls, *names):
        return cls(frozenset(names))

    def has(self, name: str) -> bool:
        return name in self.flags

    def with_flag(self, name: str) -> "StateVector":
        return StateVector(self.flags | {name})

    def ordered(self, design: DesignConfig) -> tuple:
        return tuple(n for n in design.flag_names if n in self.flags)

    def state_id(self, design: DesignConfig) -> str:
        return "+".join(self.ordered(design)) or "(empty)"


EMPTY_STATE = StateVector(frozenset())


def _mode_of(state: StateVector, design: DesignConfig):
    present = [m for m in design.modes if state.has(m)]
    return present[0] if len(present) == 1 else None


def violations(state: StateVector, design: DesignConfig) -> list:
    """Names of the coherence rules the state breaks (empty = valid)."""
    out = []
    unknown = state.flags - set(design.flag_names)
    if unknown:
        out.append("unknown_flag")
    modes = [m for m in design.modes if state.has(m)]
    if len(modes) > 1:
        out.append("single_mode")
    levels = [lvl for lvl in design.levels if state.has(f"{lvl}_level")]
    if len(levels) > 1:
        out.append("single_level")
    if levels:
        mode = modes[0] if len(modes) == 1 else None
        if mode is None or any(lvl not in design.levels_of(mode) for lvl in levels):
            out.append("level_needs_leveled_mode")
    return out


def is_valid(state: StateVector, design: DesignConfig = CURRENT_DESIGN) -> bool:
    return not violations(state, design)


def _rules(design: DesignConfig):
    """Ordered (rule_name, action, predicate) triples; the first predicate
    that holds decides the next question."""

    def topic_missing(s):
        return not s.has("topic") and not s.has("sub_topic")

    def mode_missing(s):
        return _mode_of(s, design) is None

    def level_missing(s):
        mode = _mode_of(s, design)
        if mode is None or len(design.levels_of(mode)) < 2:
            return False
        return not any(s.has(f"{lvl}_level") for lvl in design.levels_of(mode))

    def subtopic_missing(s):
        if s.has("sub_topic") or not s.has("topic"):
            return False
        mode = _mode_of(s, design)
        if mode is None:
            return False
        return mode in design.section_scoped_modes or s.has("section_level")

    def sub_subtopic_missing(s):
        # only content located at section level descends one layer further;
        # section-scoped modes (quizzes) stay attached to their section
        return (
            not s.has("sub_sub_topic")
            and s.has("sub_topic")
            and s.has("section_level")
        )

    def question_number_missing(s):
        return not s.has("question_number")

    rules = [
        ("topic_missing", "ask_topic", topic_missing),
        ("mode_missing", "ask_exam_mode", mode_missing),
        ("level_missing", "ask_level", level_missing),
        ("subtopic_missing", "ask_subtopic", subtopic_missing),
    ]
    if design.deep_hierarchy:
        rules.append(("sub_subtopic_missing", "ask_sub_subtopic", sub_subtopic_missing))
    rules.append(("question_number_missing", "ask_question_number", question_number_missing))
    return rules


def next_action(state: StateVector, design: DesignConfig = CURRENT_DESIGN):
    """(action, rule_name) for the first matching rule, (None, None) when
    every requirement of the design is satisfied."""
    for rule_name, action, predicate in _rules(design):
        if predicate(state):
            return action, rule_name
    return None, None


def is_terminal(state: StateVector, design: DesignConfig = CURRENT_DESIGN) -> bool:
    """All questions answered: no rule fires and the topic anchor exists."""
    action, _ = next_action(state, design)
    return action is None and state.has("topic")


def enumerate_valid_states(design: DesignConfig = CURRENT_DESIGN) -> list:
    names = design.flag_names
    states = []
    for bits in itertools.product((False, True), repeat=len(names)):
        state = StateVector(frozenset(n for n, b in zip(names, bits) if b))
        if is_valid(state, design):
            states.append(state)
    return states


@dataclass(frozen=True)
class TransitionRow:
    state_id: str
    flags: tuple
    action: str
    rule: str


def transition_table(design: DesignConfig = CURRENT_DESIGN) -> list:
    """One row per valid, informative (at least one flag), non-terminal
    state that some rule covers. States no rule can ever discharge (a
    known sub-topic whose chapter was somehow lost) carry no row; the
    extractor repairs them by always filling the parent chapter."""
    rows = []
    for state in enumerate_valid_states(design):
        if not state.flags:
            continue
        action, rule = next_action(state, design)
        if action is None:
            continue
        rows.append(
            TransitionRow(state.state_id(design), state.ordered(design), action, rule)
        )
    rows.sort(key=lambda r: (len(r.flags), r.flags))
    return rows


def summarize_table(design: DesignConfig = CURRENT_DESIGN) -> dict:
    """Size audit of the generated table: row count, per-action counts,
    and how the valid states split into rows / terminal / uncovered."""
    valid = enumerate_valid_states(design)
    rows = transition_table(design)
    per_action = {}
    for row in rows:
        per_action[row.action] = per_action.get(row.action, 0) + 1
    terminal = sum(1 for s in valid if is_terminal(s, design))
    empty = sum(1 for s in valid if not s.flags)
    uncovered = len(valid) - len(rows) - terminal - empty
    return {
        "flags": list(design.flag_names),
        "valid_states": len(valid),
        "rows": len(rows),
        "per_action": per_action,
        "terminal_states": terminal,
        "uncovered_states": uncovered,
        "empty_states": empty,
    }


def table_fingerprint(design: DesignConfig = CURRENT_DESIGN) -> str:
    digest = hashlib.sha256()
    for row in transition_table(design):
        digest.update(f"{row.state_id}->{row.action}[{row.rule}]\n".encode("utf-8"))
    return digest.hexdigest()


def state_of(info: InformationDictionary, design: DesignConfig = CURRENT_DESIGN) -> StateVector:
    """Project an information dictionary onto presence flags.

    Free-text answers the user insisted on (ground truth) still fill
    their slot: an unrecognized examination mode routes like a final
    examination (no level, no section questions) and an unrecognized
    level counts as the chapter level. Only the routing is coarsened;
    the stored text is kept verbatim for the summary and the exports.
    """
    flags = set()
    if info.topic is not None:
        flags.add("topic")
    if info.subtopic is not None:
        flags.add("sub_topic")
    mode = None
    if info.exam_mode is not None:
        if info.is_ground_truth("exam_mode") or info.exam_mode not in design.modes:
            mode = "final_examination"
        else:
            mode = info.exam_mode
        flags.add(mode)
    if info.exam_level is not None and mode is not None:
        level = info.exam_level
        if info.is_ground_truth("exam_level") or level not in design.levels:
            level = "chapter"
        if level in design.levels_of(mode):
            flags.add(f"{level}_level")
    if info.question_number is not None:
        flags.add("question_number")
    return StateVector(frozenset(flags))


def is_complete(info: InformationDictionary, design: DesignConfig = CURRENT_DESIGN) -> bool:
    return is_terminal(state_of(info, design), design)
