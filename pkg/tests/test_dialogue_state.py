"""Rule-generated state machine vs. brute-force set-logic oracles."""

import time

import pytest

from oracles import (
    CURRENT_FLAGS,
    LEGACY_FLAGS,
    enumerate_coherent,
    reference_next_question,
)
from tutordesk.dialogue_state import (
    CURRENT_DESIGN,
    DesignConfig,
    EMPTY_STATE,
    LEGACY_DESIGN,
    StateVector,
    enumerate_valid_states,
    is_complete,
    is_terminal,
    is_valid,
    next_action,
    state_of,
    summarize_table,
    table_fingerprint,
    transition_table,
    violations,
)
from tutordesk.nlu import InformationDictionary, Provenance


# -- validity enumeration ------------------------------------------------------

def test_flag_names_match_documented_layout():
    assert CURRENT_DESIGN.flag_names == CURRENT_FLAGS
    assert LEGACY_DESIGN.flag_names == LEGACY_FLAGS


def test_valid_states_match_brute_force_oracle():
    oracle = set(enumerate_coherent(CURRENT_FLAGS))
    package = {s.flags for s in enumerate_valid_states(CURRENT_DESIGN)}
    assert package == oracle
    assert len(package) == 72


def test_legacy_valid_states_match_brute_force_oracle():
    oracle = set(enumerate_coherent(LEGACY_FLAGS))
    package = {s.flags for s in enumerate_valid_states(LEGACY_DESIGN)}
    assert package == oracle
    assert len(package) == 144


def test_violation_names():
    design = CURRENT_DESIGN
    assert violations(StateVector.of("training", "quiz"), design) == ["single_mode"]
    assert violations(
        StateVector.of("training", "chapter_level", "section_level"), design
    ) == ["single_level"]
    assert violations(
        StateVector.of("quiz", "chapter_level"), design
    ) == ["level_needs_leveled_mode"]
    assert violations(
        StateVector.of("chapter_level"), design
    ) == ["level_needs_leveled_mode"]
    assert violations(StateVector.of("nonsense"), design) == ["unknown_flag"]
    assert violations(EMPTY_STATE, design) == []
    assert is_valid(StateVector.of("topic", "training", "chapter_level"), design)


# -- next-question rules ---------------------------------------------------------

def test_next_action_agrees_with_oracle_on_every_valid_state():
    for state in enumerate_valid_states(CURRENT_DESIGN):
        expected = reference_next_question(state.flags, deep=False)
        action, rule = next_action(state, CURRENT_DESIGN)
        assert action == expected, state.state_id(CURRENT_DESIGN)
        assert (rule is None) == (action is None)


def test_legacy_next_action_agrees_with_oracle():
    for state in enumerate_valid_states(LEGACY_DESIGN):
        expected = reference_next_question(state.flags, deep=True)
        action, _ = next_action(state, LEGACY_DESIGN)
        assert action == expected, state.state_id(LEGACY_DESIGN)


def test_empty_state_asks_for_topic():
    action, rule = next_action(EMPTY_STATE, CURRENT_DESIGN)
    assert action == "ask_topic"
    assert rule == "topic_missing"


def test_quiz_descends_to_section_without_level_question():
    state = StateVector.of("topic", "quiz")
    action, _ = next_action(state, CURRENT_DESIGN)
    assert action == "ask_subtopic"


def test_final_examination_skips_level_and_section():
    state = StateVector.of("topic", "final_examination")
    action, _ = next_action(state, CURRENT_DESIGN)
    assert action == "ask_question_number"


def test_chapter_level_training_needs_no_subtopic():
    state = StateVector.of("topic", "training", "chapter_level")
    action, _ = next_action(state, CURRENT_DESIGN)
    assert action == "ask_question_number"


def test_section_level_training_descends():
    state = StateVector.of("topic", "training", "section_level")
    action, _ = next_action(state, CURRENT_DESIGN)
    assert action == "ask_subtopic"


def test_terminal_states():
    assert is_terminal(
        StateVector.of("topic", "final_examination", "question_number"),
        CURRENT_DESIGN,
    )
    assert is_terminal(
        StateVector.of("topic", "sub_topic", "quiz", "question_number"),
        CURRENT_DESIGN,
    )
    assert not is_terminal(
        StateVector.of("topic", "quiz", "question_number"), CURRENT_DESIGN
    )
    # a lone sub_topic satisfies every rule but lacks the anchor
    assert not is_terminal(
        StateVector.of("sub_topic", "final_examination", "question_number"),
        CURRENT_DESIGN,
    )


# -- generated transition table ----------------------------------------------------

def test_table_has_exactly_56_rows():
    rows = transition_table(CURRENT_DESIGN)
    assert len(rows) == 56


def test_legacy_table_has_exactly_117_rows_and_is_strictly_larger():
    current = transition_table(CURRENT_DESIGN)
    legacy = transition_table(LEGACY_DESIGN)
    assert len(legacy) == 117
    assert len(legacy) > len(current)


def test_per_action_row_counts():
    summary = summarize_table(CURRENT_DESIGN)
    assert summary["per_action"] == {
        "ask_topic": 17,
        "ask_exam_mode": 6,
        "ask_level": 12,
        "ask_subtopic": 6,
        "ask_question_number": 15,
    }


def test_valid_state_decomposition():
    summary = summarize_table(CURRENT_DESIGN)
    assert summary["valid_states"] == 72
    assert summary["rows"] == 56
    assert summary["terminal_states"] == 9
    assert summary["uncovered_states"] == 6
    assert summary["empty_states"] == 1
    assert (
        summary["rows"] + summary["terminal_states"]
        + summary["uncovered_states"] + summary["empty_states"]
        == summary["valid_states"]
    )


def test_table_rows_match_oracle_actions():
    for row in transition_table(CURRENT_DESIGN):
        assert row.action == reference_next_question(frozenset(row.flags))


def test_table_rows_are_unique_valid_and_sorted():
    rows = transition_table(CURRENT_DESIGN)
    assert len({r.state_id for r in rows}) == len(rows)
    keys = [(len(r.flags), r.flags) for r in rows]
    assert keys == sorted(keys)
    for row in rows:
        assert is_valid(StateVector(frozenset(row.flags)), CURRENT_DESIGN)
        assert row.flags  # the empty state never carries a row


def test_uncovered_states_are_the_anchorless_complete_ones():
    """Rows + terminals + empty leave exactly the states where sub_topic
    exists without its chapter; the extractor always backfills the parent,
    so no live dialogue can reach them."""
    valid = enumerate_valid_states(CURRENT_DESIGN)
    covered = {r.state_id for r in transition_table(CURRENT_DESIGN)}
    leftovers = [
        s for s in valid
        if s.flags and s.state_id(CURRENT_DESIGN) not in covered
        and not is_terminal(s, CURRENT_DESIGN)
    ]
    assert len(leftovers) == 6
    for state in leftovers:
        assert state.has("sub_topic") and not state.has("topic")
        action, _ = next_action(state, CURRENT_DESIGN)
        assert action is None


def test_fingerprint_is_stable_and_design_specific():
    assert table_fingerprint(CURRENT_DESIGN) == table_fingerprint(CURRENT_DESIGN)
    assert table_fingerprint(CURRENT_DESIGN) != table_fingerprint(LEGACY_DESIGN)


def test_generation_completes_quickly():
    start = time.perf_counter()
    transition_table(CURRENT_DESIGN)
    transition_table(LEGACY_DESIGN)
    summarize_table(CURRENT_DESIGN)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0


# -- design configuration -----------------------------------------------------------

def test_design_rejects_incomplete_mode_levels():
    with pytest.raises(ValueError):
        DesignConfig(modes=("training", "quiz"),
                     mode_levels=(("training", ("chapter",)),))


def test_design_rejects_unknown_section_scoped_mode():
    with pytest.raises(ValueError):
        DesignConfig(section_scoped_modes=("midterm",))


def test_chapter_only_variant_regenerates_smaller_table():
    flat = DesignConfig(
        modes=("training", "final_examination"),
        mode_levels=(("training", ()), ("final_examination", ())),
        section_scoped_modes=(),
    )
    rows = transition_table(flat)
    assert 0 < len(rows) < 56
    for row in rows:
        assert row.action in ("ask_topic", "ask_exam_mode", "ask_question_number")


# -- projection from the information dictionary ---------------------------------------

def fill(info, slot, value, kind="extracted"):
    info.set_slot(slot, value, Provenance(kind, 0, (0, 1)))


def test_state_of_projects_presence_flags():
    info = InformationDictionary()
    fill(info, "topic", "t05")
    fill(info, "exam_mode", "training")
    fill(info, "exam_level", "section")
    state = state_of(info, CURRENT_DESIGN)
    assert state.flags == frozenset({"topic", "training", "section_level"})


def test_state_of_routes_free_text_mode_like_final_exam():
    info = InformationDictionary()
    fill(info, "topic", "t05")
    fill(info, "exam_mode", "a mock test we did in class", kind="user_ground_truth")
    state = state_of(info, CURRENT_DESIGN)
    assert state.has("final_examination")
    action, _ = next_action(state, CURRENT_DESIGN)
    assert action == "ask_question_number"


def test_state_of_coarsens_free_text_level_to_chapter():
    info = InformationDictionary()
    fill(info, "topic", "t05")
    fill(info, "exam_mode", "training")
    fill(info, "exam_level", "somewhere in the middle", kind="user_ground_truth")
    state = state_of(info, CURRENT_DESIGN)
    assert state.has("chapter_level")
    assert not state.has("section_level")


def test_state_of_drops_level_without_mode():
    info = InformationDictionary()
    fill(info, "topic", "t05")
    fill(info, "exam_level", "chapter")
    state = state_of(info, CURRENT_DESIGN)
    assert not state.has("chapter_level")
    assert is_valid(state, CURRENT_DESIGN)


def test_state_of_never_produces_invalid_states():
    # pairwise combinations of plausible slot contents, including free text
    values = {
        "topic": ["t02", None],
        "subtopic": ["t02-s1", None],
        "exam_mode": ["training", "quiz", "final_examination", "oral exam", None],
        "exam_level": ["chapter", "section", "whatever fits", None],
        "question_number": ["5a", None],
    }
    import itertools
    for combo in itertools.product(*values.values()):
        info = InformationDictionary()
        for slot, value in zip(values.keys(), combo):
            if value is None:
                continue
            kind = "extracted"
            if value in ("oral exam", "whatever fits"):
                kind = "user_ground_truth"
            fill(info, slot, value, kind=kind)
        assert is_valid(state_of(info, CURRENT_DESIGN), CURRENT_DESIGN)


def test_is_complete_matches_terminality():
    info = InformationDictionary()
    fill(info, "topic", "t05")
    fill(info, "exam_mode", "final_examination")
    assert not is_complete(info, CURRENT_DESIGN)
    fill(info, "question_number", "3")
    assert is_complete(info, CURRENT_DESIGN)


# -- state vector helpers --------------------------------------------------------------

def test_state_vector_helpers():
    state = StateVector.of("training", "topic")
    assert state.has("topic") and not state.has("quiz")
    grown = state.with_flag("question_number")
    assert grown.has("question_number") and not state.has("question_number")
    assert grown.ordered(CURRENT_DESIGN) == ("topic", "training", "question_number")
    assert grown.state_id(CURRENT_DESIGN) == "topic+training+question_number"
    assert EMPTY_STATE.state_id(CURRENT_DESIGN) == "(empty)"
