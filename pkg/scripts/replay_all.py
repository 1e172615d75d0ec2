"""Replay all reference dialogues and assert the expected action sequences."""
import sys

sys.path.insert(0, "src")

from tutordesk.config import EngineConfig
from tutordesk.engine import Engine

CASES = {
    "sc1": (
        [
            "When is the deadline for the certificate?",
            "When is the deadline for the certificate?",
        ],
        ["org_ack", "human_handover"],
    ),
    "sc2": (
        [
            "Hi, I can not solve the training 7 b in Chapter I",
            "CHAP",
        ],
        ["ask_level", "final_request"],
    ),
    "sc3": (
        [
            "Hello!",
            "MATH",
            "I want to talk to a human",
        ],
        ["unknown_intent_menu", "ask_topic", "human_handover"],
    ),
    "sc4": (
        [
            "What does the rule of three mean?",
            "What does the rule of three mean exactly?",
        ],
        ["context_ack", "human_handover"],
    ),
    "sc5": (
        [
            "Hi, I do not understand the Training 1 (a) in Chapter 1",
            "I think it is section",
            "I am working on roots and powers",
            "nope",
            "d",
            "1 (a)",
            "yes",
            "I do not understand how to simplify it.",
        ],
        [
            "ask_level",
            "ask_subtopic",
            "final_request",
            "verify_request",
            "correct_request",
            "final_request",
            "exact_question",
            "human_handover",
        ],
    ),
}


def main():
    eng = Engine(EngineConfig(), clock=lambda: "2026-01-01T00:00:00Z")
    failures = 0
    for name, (msgs, expected) in CASES.items():
        sid = eng.new_session(name)
        actual = []
        for m in msgs:
            act = eng.handle_message(sid, m)
            actual.append(act.action)
        status = "ok" if actual == expected else "FAIL"
        if actual != expected:
            failures += 1
        print(f"{name}: {status}")
        if actual != expected:
            print(f"  expected: {expected}")
            print(f"  actual:   {actual}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
