"""Self-chat corpus generation: determinism, shape, and persistence."""

import pytest

from tutordesk.export import bundle_dialogues
from tutordesk.harness import run_suite
from tutordesk.simulate import generate_corpus, make_clock
from tutordesk.store import DialogueStore


@pytest.fixture(scope="module")
def small_corpus():
    return generate_corpus(n=40, seed=11)


def test_generation_is_deterministic():
    one = generate_corpus(n=15, seed=3)
    two = generate_corpus(n=15, seed=3)
    assert [s.to_dict() for s in one["scenarios"]] == [s.to_dict() for s in two["scenarios"]]
    assert one["stats"] == two["stats"]


def test_different_seeds_differ():
    one = generate_corpus(n=15, seed=3)
    two = generate_corpus(n=15, seed=4)
    assert [s.to_dict() for s in one["scenarios"]] != [s.to_dict() for s in two["scenarios"]]


def test_every_dialogue_ends_in_handover(small_corpus):
    for scenario in small_corpus["scenarios"]:
        assert scenario.terminal == {"outcome": "handover"}
        assert scenario.steps[-1].expect_action == "human_handover"
        assert scenario.steps[-1].reply is None
        # only the final step may close the script
        for step in scenario.steps[:-1]:
            assert step.reply is not None


def test_stats_reflect_scenarios(small_corpus):
    stats = small_corpus["stats"]
    scenarios = small_corpus["scenarios"]
    assert stats["dialogues"] == len(scenarios) == 40
    turns = [len(s.steps) for s in scenarios]
    assert stats["user_turns"] == sum(turns)
    assert stats["max_user_turns"] == max(turns)
    assert stats["avg_user_turns"] == round(sum(turns) / len(turns), 2)
    total_actions = sum(stats["action_counts"].values())
    assert total_actions == stats["user_turns"]
    assert stats["action_counts"]["human_handover"] == len(scenarios)


def test_dialogue_length_is_bounded(small_corpus):
    # liveness: 5 ask slots x 3 strikes plus the meta turns can never
    # exceed the simulator's hard budget
    assert small_corpus["stats"]["max_user_turns"] <= 15


def test_generated_scripts_replay_green(small_corpus):
    report = run_suite(small_corpus["scenarios"])
    assert report["passed"] == report["total"]


def test_persisted_corpus_round_trips(tmp_path):
    storage = str(tmp_path / "store")
    result = generate_corpus(n=12, seed=5, storage_path=storage)
    store = DialogueStore(storage)
    ids = store.dialogue_ids()
    assert len(ids) == 12

    dialogues = bundle_dialogues(store)
    assert len(dialogues) == 12
    by_id = {d["dialogue_id"]: d for d in dialogues}
    for scenario in result["scenarios"]:
        stored = by_id[scenario.scenario_id]
        texts = [t["user_text"] for t in stored["turns"]]
        expected = [scenario.opening] + [s.reply for s in scenario.steps[:-1]]
        assert texts == expected
        actions = [t["action"] for t in stored["turns"]]
        assert actions == [s.expect_action for s in scenario.steps]
        assert store.read_dialogue(scenario.scenario_id)["outcome"] == "handover"


def test_clock_produces_monotonic_timestamps():
    clock = make_clock("2026-02-01T00:00:00+00:00")
    stamps = [clock() for _ in range(5)]
    assert stamps == sorted(stamps)
    assert len(set(stamps)) == 5
    assert stamps[0] == "2026-02-01T00:00:00Z"


def test_corpus_mixes_dialogue_kinds(small_corpus):
    # the corpus is not all happy-path: menus, summaries, and early human
    # requests appear alongside the slot-filling flows
    actions = small_corpus["stats"]["action_counts"]
    assert actions.get("unknown_intent_menu", 0) > 0
    assert actions.get("org_ack", 0) + actions.get("context_ack", 0) > 0
    assert actions.get("final_request", 0) > 0
    assert actions.get("verify_request", 0) > 0
