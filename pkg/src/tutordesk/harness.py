"""Self-chat evaluation: scripted scenarios replayed against the engine.

A scenario opens with a user message and scripts one step per system
reply: the action the system must pick, optionally the slot values that
must hold afterwards, and the user's next message. The runner feeds the
script to a real engine instance (the same code path the service uses)
and fails on the first mismatching turn, reporting the turn number with
expected and actual values.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import EngineConfig
from .engine import Engine
from .policy import ACTIONS
from .nlu import SLOTS

MAX_SCRIPT_TURNS = 20


@dataclass
class ScenarioStep:
    expect_action: str
    expect_slots: dict = None  # slot -> value that must hold after the turn
    reply: str = None          # next user message; None ends the script


@dataclass
class Scenario:
    scenario_id: str
    opening: str
    steps: list
    terminal: dict = None  # {"outcome":…, "reason":…, "complete":…, "slots":{…}}

    def validate(self):
        if not self.steps:
            raise ValueError(f"{self.scenario_id}: scenario has no steps")
        if len(self.steps) > MAX_SCRIPT_TURNS:
            raise ValueError(
                f"{self.scenario_id}: script exceeds {MAX_SCRIPT_TURNS} turns"
            )
        for i, step in enumerate(self.steps):
            if step.expect_action is not None and step.expect_action not in ACTIONS:
                raise ValueError(
                    f"{self.scenario_id} step {i}: "
                    f"unknown action {step.expect_action!r}"
                )
            for slot in (step.expect_slots or {}):
                if slot not in SLOTS:
                    raise ValueError(
                        f"{self.scenario_id} step {i}: unknown slot {slot!r}"
                    )
        for i, step in enumerate(self.steps[:-1]):
            if step.reply is None:
                raise ValueError(
                    f"{self.scenario_id} step {i}: missing reply before later steps"
                )

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "opening": self.opening,
            "steps": [
                {
                    "expect_action": s.expect_action,
                    "expect_slots": s.expect_slots,
                    "reply": s.reply,
                }
                for s in self.steps
            ],
            "terminal": self.terminal,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        steps = [
            ScenarioStep(
                expect_action=s.get("expect_action"),
                expect_slots=s.get("expect_slots"),
                reply=s.get("reply"),
            )
            for s in data["steps"]
        ]
        return cls(
            scenario_id=data["scenario_id"],
            opening=data["opening"],
            steps=steps,
            terminal=data.get("terminal"),
        )


@dataclass
class ScenarioResult:
    scenario_id: str
    passed: bool
    failed_turn: int = None
    expected: object = None
    actual: object = None
    detail: str = None

    def to_dict(self) -> dict:
        out = {"scenario_id": self.scenario_id, "passed": self.passed}
        if not self.passed:
            out.update({
                "failed_turn": self.failed_turn,
                "expected": self.expected,
                "actual": self.actual,
                "detail": self.detail,
            })
        return out


def default_engine_factory():
    return Engine(EngineConfig(), clock=lambda: "1970-01-01T00:00:00Z")


def run_scenario(scenario: Scenario, engine: Engine = None) -> ScenarioResult:
    scenario.validate()
    engine = engine or default_engine_factory()
    sid = engine.new_session()

    def fail(turn, expected, actual, detail):
        return ScenarioResult(scenario.scenario_id, False, turn, expected, actual, detail)

    message = scenario.opening
    for turn, step in enumerate(scenario.steps):
        try:
            act = engine.handle_message(sid, message)
        except Exception as exc:  # engine fault is a failure, not a crash
            return fail(turn, step.expect_action, None, f"engine error: {exc!r}")
        if step.expect_action is not None and act.action != step.expect_action:
            return fail(turn, step.expect_action, act.action, "action mismatch")
        if step.expect_slots:
            view = engine.session_view(sid)
            for slot, expected_value in step.expect_slots.items():
                actual_value = view["slots"][slot]["value"]
                if actual_value != expected_value:
                    return fail(
                        turn, {slot: expected_value}, {slot: actual_value},
                        "slot mismatch",
                    )
        message = step.reply

    if scenario.terminal:
        view = engine.session_view(sid)
        term = scenario.terminal
        if "outcome" in term and view["outcome"] != term["outcome"]:
            return fail(len(scenario.steps) - 1, term["outcome"], view["outcome"],
                        "terminal outcome mismatch")
        if "reason" in term and view["handover_reason"] != term["reason"]:
            return fail(len(scenario.steps) - 1, term["reason"],
                        view["handover_reason"], "terminal reason mismatch")
        if "complete" in term and view["complete"] != term["complete"]:
            return fail(len(scenario.steps) - 1, term["complete"], view["complete"],
                        "terminal completeness mismatch")
        for slot, expected_value in (term.get("slots") or {}).items():
            actual_value = view["slots"][slot]["value"]
            if actual_value != expected_value:
                return fail(len(scenario.steps) - 1, {slot: expected_value},
                            {slot: actual_value}, "terminal slot mismatch")
    return ScenarioResult(scenario.scenario_id, True)


def run_suite(scenarios, engine_factory=default_engine_factory) -> dict:
    started = time.perf_counter()
    results = [run_scenario(s, engine_factory()) for s in scenarios]
    failed = [r for r in results if not r.passed]
    return {
        "total": len(results),
        "passed": len(results) - len(failed),
        "failed": [r.to_dict() for r in failed],
        "duration_s": round(time.perf_counter() - started, 3),
    }


def format_report(report: dict) -> str:
    lines = [
        f"scenarios: {report['total']}  passed: {report['passed']}  "
        f"failed: {len(report['failed'])}  ({report['duration_s']}s)"
    ]
    for f in report["failed"]:
        lines.append(
            f"  FAIL {f['scenario_id']} at turn {f['failed_turn']}: "
            f"{f['detail']} (expected {f['expected']!r}, got {f['actual']!r})"
        )
    return "\n".join(lines)


# -- file I/O ----------------------------------------------------------------

def load_scenarios(path) -> list:
    """Load scenarios from a .json file (one object or a list) or a directory."""
    path = Path(path)
    if path.is_dir():
        scenarios = []
        for p in sorted(path.glob("*.json")):
            scenarios.extend(load_scenarios(p))
        return scenarios
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    items = data if isinstance(data, list) else [data]
    return [Scenario.from_dict(d) for d in items]


def save_scenarios(scenarios, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([s.to_dict() for s in scenarios], fh,
                  ensure_ascii=False, sort_keys=True, indent=1)
        fh.write("\n")
