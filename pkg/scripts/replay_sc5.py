"""Replay the long correction dialogue end-to-end and print each exchange."""
import sys

sys.path.insert(0, "src")

from tutordesk.config import EngineConfig
from tutordesk.engine import Engine


def main():
    eng = Engine(EngineConfig(), clock=lambda: "2026-01-01T00:00:00Z")
    sid = eng.new_session("sc5")
    msgs = [
        "Hi, I do not understand the Training 1 (a) in Chapter 1",
        "I think it is section",
        "I am working on roots and powers",
        "nope",
        "d",
        "1 (a)",
        "yes",
        "I do not understand how to simplify the expression in part a.",
    ]
    for m in msgs:
        act = eng.handle_message(sid, m)
        print(f"USER: {m}")
        print(f"BOT [{act.action}]: {act.utterance}")
        view = eng.session_view(sid)
        slots = {k: v["value"] for k, v in view["slots"].items()}
        print(f"  slots={slots} phase={view['phase']}")
        print()
    view = eng.session_view(sid)
    print("final outcome:", view["outcome"], "reason:", view["handover_reason"])


if __name__ == "__main__":
    main()
