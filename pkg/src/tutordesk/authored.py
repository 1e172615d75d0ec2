"""Hand-authored scenario corpus for the self-chat evaluation suite.

Builds 150+ scripted dialogues that together cover every completeness
case of the ticket design (training/exercise at chapter and section
level, quiz, final examination), every ask action, permalink openings,
the 3-strike fallbacks, the human keyword in every dialogue phase,
verification corrections for each letter, organisational/contextual
routing, the intent menu, and misspelled catalog references at edit
distances 1, 2, and 3.

Run ``python3 -m tutordesk.authored --out <file>`` to write the corpus
as a scenario JSON file.
"""

import argparse

from .catalog import load_catalog
from .harness import Scenario, ScenarioStep, save_scenarios

# answering with these full titles alone ties another entry on both score
# and coverage ("Lines and Planes" vs "Lines in the Plane"), which the
# extractor refuses to guess on; authored answers pick their siblings
_AVOID_BARE = {"t09-s3", "t10-s1"}

_CHAPTER_ANSWERS = ("the whole chapter", "chapter level", "CHAP")
_SECTION_ANSWERS = ("a specific section", "section level", "SEC")
_YES_ANSWERS = ("yes", "correct", "yep")
_SUMMARIES = (
    "I cannot solve part {l} at all",
    "My result differs from the sample solution",
    "I do not understand the second step of {n}{l}",
)


def _s(action, slots=None, reply=None):
    return ScenarioStep(action, slots, reply)


def _subs_for(catalog, topic):
    subs = [s for s in catalog.subtopics_of(topic.entry_id)
            if s.entry_id not in _AVOID_BARE]
    return subs


def _qnr(i):
    n = (i % 12) + 1
    letter = "abcde"[i % 5]
    forms = (f"{n} {letter}", f"{n}{letter}", f"{n} ({letter})")
    return forms[i % 3], f"{n}{letter}", n, letter


def _summary(i, n, letter):
    return _SUMMARIES[i % 3].format(n=n, l=letter)


def _closing(i, n, letter, slots):
    """Shared tail: confirm the list, state the question, get handed over."""
    return [
        _s("final_request", slots, _YES_ANSWERS[i % 3]),
        _s("exact_question", None, _summary(i, n, letter)),
        _s("human_handover", None, None),
    ]


def _terminal(slots, reason="ticket_complete", complete=True):
    return {"outcome": "handover", "reason": reason,
            "complete": complete, "slots": slots}


# -- the six completeness cases, parametrized over every chapter --------------

def _chapter_level_flows(catalog, mode, openings):
    scenarios = []
    for i, topic in enumerate(catalog.topics):
        opening = openings[i % len(openings)].format(title=topic.title)
        qnr_text, canon, n, letter = _qnr(i)
        steps = [
            _s("ask_level", {"topic": topic.entry_id, "exam_mode": mode},
               _CHAPTER_ANSWERS[i % 3]),
            _s("ask_question_number", {"exam_level": "chapter"}, qnr_text),
        ]
        steps += _closing(i, n, letter, {"question_number": canon})
        scenarios.append(Scenario(
            scenario_id=f"flow-{mode}-chapter-{topic.entry_id}",
            opening=opening,
            steps=steps,
            terminal=_terminal({
                "topic": topic.entry_id, "subtopic": None, "exam_mode": mode,
                "exam_level": "chapter", "question_number": canon,
            }),
        ))
    return scenarios


def _section_level_flows(catalog, mode, openings, variant):
    scenarios = []
    for i, topic in enumerate(catalog.topics):
        subs = _subs_for(catalog, topic)
        sub = subs[(i + variant) % len(subs)]
        opening = openings[i % len(openings)].format(title=topic.title)
        qnr_text, canon, n, letter = _qnr(i + variant)
        sub_reply = sub.title if i % 2 else f"the section on {sub.title}"
        steps = [
            _s("ask_level", {"topic": topic.entry_id, "exam_mode": mode},
               _SECTION_ANSWERS[i % 3]),
            _s("ask_subtopic", {"exam_level": "section"}, sub_reply),
            _s("ask_question_number", {"subtopic": sub.entry_id}, qnr_text),
        ]
        steps += _closing(i, n, letter, {"question_number": canon})
        scenarios.append(Scenario(
            scenario_id=f"flow-{mode}-section-{topic.entry_id}",
            opening=opening,
            steps=steps,
            terminal=_terminal({
                "topic": topic.entry_id, "subtopic": sub.entry_id,
                "exam_mode": mode, "exam_level": "section",
                "question_number": canon,
            }),
        ))
    return scenarios


def _quiz_flows(catalog):
    openings = (
        "I am taking the quiz on {title}",
        "The quiz about {title} is hard",
        "Quiz trouble: {title}",
    )
    scenarios = []
    for i, topic in enumerate(catalog.topics):
        subs = _subs_for(catalog, topic)
        sub = subs[(i + 2) % len(subs)]
        qnr_text, canon, n, letter = _qnr(i + 2)
        steps = [
            _s("ask_subtopic", {"topic": topic.entry_id, "exam_mode": "quiz"},
               sub.title),
            _s("ask_question_number", {"subtopic": sub.entry_id}, qnr_text),
        ]
        steps += _closing(i, n, letter, {"question_number": canon})
        scenarios.append(Scenario(
            scenario_id=f"flow-quiz-{topic.entry_id}",
            opening=openings[i % 3].format(title=topic.title),
            steps=steps,
            terminal=_terminal({
                "topic": topic.entry_id, "subtopic": sub.entry_id,
                "exam_mode": "quiz", "exam_level": None,
                "question_number": canon,
            }),
        ))
    return scenarios


def _final_exam_flows(catalog):
    openings = (
        "I am preparing for the final examination, chapter {title}",
        "Final exam question in {title}",
        "About the final examination on {title}",
    )
    scenarios = []
    for i, topic in enumerate(catalog.topics):
        qnr_text, canon, n, letter = _qnr(i + 4)
        steps = [
            _s("ask_question_number",
               {"topic": topic.entry_id, "exam_mode": "final_examination"},
               qnr_text),
        ]
        steps += _closing(i, n, letter, {"question_number": canon})
        scenarios.append(Scenario(
            scenario_id=f"flow-final_examination-{topic.entry_id}",
            opening=openings[i % 3].format(title=topic.title),
            steps=steps,
            terminal=_terminal({
                "topic": topic.entry_id, "subtopic": None,
                "exam_mode": "final_examination", "exam_level": None,
                "question_number": canon,
            }),
        ))
    return scenarios


# -- every ask action exercised in a single dialogue --------------------------

def _all_asks_flows(catalog):
    openings = (
        "I am stuck on a task and need help",
        "Can you help me solve something?",
        "I need help with my math homework",
    )
    scenarios = []
    for i, topic in enumerate(catalog.topics):
        subs = _subs_for(catalog, topic)
        sub = subs[i % len(subs)]
        qnr_text, canon, n, letter = _qnr(i + 1)
        steps = [
            _s("ask_topic", None, topic.title),
            _s("ask_exam_mode", {"topic": topic.entry_id}, "an exercise"),
            _s("ask_level", {"exam_mode": "exercise"}, "a specific section"),
            _s("ask_subtopic", {"exam_level": "section"}, sub.title),
            _s("ask_question_number", {"subtopic": sub.entry_id}, qnr_text),
        ]
        steps += _closing(i, n, letter, {"question_number": canon})
        scenarios.append(Scenario(
            scenario_id=f"asks-all-{topic.entry_id}",
            opening=openings[i % 3],
            steps=steps,
            terminal=_terminal({
                "topic": topic.entry_id, "subtopic": sub.entry_id,
                "exam_mode": "exercise", "exam_level": "section",
                "question_number": canon,
            }),
        ))
    return scenarios


# -- permalink openings --------------------------------------------------------

def _permalink_flows(catalog):
    host = catalog.permalink_hosts[0]
    scenarios = []
    cases = [
        ("training", "t03", None),
        ("exercise", "t07", "7b"),
        ("quiz", "t12", "3a"),
        ("final_examination", "t09", "9c"),
        ("training", "t06", "2e"),
        ("exercise", "t13", None),
        ("quiz", "t04", None),
        ("final_examination", "t02", None),
    ]
    for mode, topic_id, qnr in cases:
        topic = catalog.by_id[topic_id]
        slug = catalog.permalink_mode_slugs[mode]
        url = f"https://{host}/{slug}" + (f"/{qnr}" if qnr else "")
        opening = f"I am stuck here: {url}"
        opened = {"exam_mode": mode}
        if qnr:
            opened["question_number"] = qnr
        steps = [_s("ask_topic", opened, topic.title)]
        slots = {"topic": topic.entry_id, "exam_mode": mode}
        if mode in ("training", "exercise"):
            steps.append(_s("ask_level", {"topic": topic.entry_id},
                            "the whole chapter"))
            slots["exam_level"] = "chapter"
            slots["subtopic"] = None
        elif mode == "quiz":
            sub = _subs_for(catalog, topic)[0]
            steps.append(_s("ask_subtopic", {"topic": topic.entry_id},
                            sub.title))
            slots["subtopic"] = sub.entry_id
            slots["exam_level"] = None
        else:
            slots["subtopic"] = None
            slots["exam_level"] = None
        if not qnr:
            steps.append(_s("ask_question_number", None, "4 d"))
            qnr = "4d"
        slots["question_number"] = qnr
        steps += [
            _s("final_request", {"question_number": qnr}, "yes"),
            _s("exact_question", None, "the hint does not help me"),
            _s("human_handover", None, None),
        ]
        tag = "qnr" if "question_number" in opened else "bare"
        scenarios.append(Scenario(
            scenario_id=f"permalink-{mode}-{tag}",
            opening=opening,
            steps=steps,
            terminal=_terminal(slots),
        ))
    return scenarios


# -- 3-strike fallbacks: unanswered asks adopt the raw reply ------------------

def _strike_flows(catalog):
    scenarios = [
        Scenario(
            scenario_id="strike-topic",
            opening="I am stuck on a task and need help",
            steps=[
                _s("ask_topic", None, "hmm"),
                _s("ask_topic", None, "let me think"),
                _s("ask_topic", None, "the one with the funny symbols"),
                _s("ask_exam_mode",
                   {"topic": "the one with the funny symbols"}, "final exam"),
                _s("ask_question_number",
                   {"exam_mode": "final_examination"}, "9 b"),
                _s("final_request", {"question_number": "9b"}, "yes"),
                _s("exact_question", None, "it is question 9 b"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "the one with the funny symbols",
                "question_number": "9b",
            }),
        ),
        Scenario(
            scenario_id="strike-subtopic",
            opening="I am taking the quiz on Geometry",
            steps=[
                _s("ask_subtopic", {"topic": "t05", "exam_mode": "quiz"},
                   "hmm"),
                _s("ask_subtopic", None, "give me a moment"),
                _s("ask_subtopic", None, "the third part I believe"),
                _s("ask_question_number",
                   {"subtopic": "the third part I believe"}, "2 c"),
                _s("final_request", {"question_number": "2c"}, "yes"),
                _s("exact_question", None, "see the quiz page"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t05", "subtopic": "the third part I believe",
                "exam_mode": "quiz", "question_number": "2c",
            }),
        ),
        Scenario(
            scenario_id="strike-exam_mode",
            opening="Chapter Integral Calculus please",
            steps=[
                _s("ask_exam_mode", {"topic": "t08"}, "hmm"),
                _s("ask_exam_mode", None, "let me think"),
                _s("ask_exam_mode", None, "the second kind I guess"),
                _s("ask_question_number",
                   {"exam_mode": "the second kind I guess"}, "4 b"),
                _s("final_request", {"question_number": "4b"}, "yes"),
                _s("exact_question", None, "cannot simplify the integrand"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t08", "exam_mode": "the second kind I guess",
                "question_number": "4b",
            }),
        ),
        Scenario(
            scenario_id="strike-exam_level",
            opening="training for Elementary Calculus",
            steps=[
                _s("ask_level", {"topic": "t01", "exam_mode": "training"},
                   "hmm"),
                _s("ask_level", None, "it depends"),
                _s("ask_level", None, "let me check later"),
                _s("ask_question_number",
                   {"exam_level": "let me check later"}, "7 c"),
                _s("final_request", {"question_number": "7c"}, "yes"),
                _s("exact_question", None, "my exponents are off"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t01", "exam_mode": "training",
                "exam_level": "let me check later", "question_number": "7c",
            }),
        ),
        Scenario(
            scenario_id="strike-question_number",
            opening="Final exam question in Probability Calculus",
            steps=[
                _s("ask_question_number",
                   {"topic": "t12", "exam_mode": "final_examination"},
                   "somewhere in the middle"),
                _s("ask_question_number", None, "I lost the sheet"),
                _s("ask_question_number", None, "I really cannot remember"),
                _s("final_request",
                   {"question_number": "I really cannot remember"}, "yes"),
                _s("exact_question", None, "the tree diagram confuses me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t12", "exam_mode": "final_examination",
                "question_number": "I really cannot remember",
            }),
        ),
        Scenario(
            scenario_id="strike-correction-value",
            opening="I am working on an exercise in Geometry",
            steps=[
                _s("ask_level", {"topic": "t05", "exam_mode": "exercise"},
                   "the whole chapter"),
                _s("ask_question_number", {"exam_level": "chapter"}, "3 a"),
                _s("final_request", {"question_number": "3a"}, "no"),
                _s("verify_request", None, "c"),
                _s("correct_request", None, "hold on"),
                _s("correct_request", None, "hmm"),
                _s("correct_request", None, "it was the last one"),
                _s("final_request",
                   {"question_number": "it was the last one"}, "yes"),
                _s("exact_question", None, "please check my solution"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t05", "exam_mode": "exercise",
                "exam_level": "chapter",
                "question_number": "it was the last one",
            }),
        ),
    ]
    return scenarios


# -- the human keyword wins in every phase -------------------------------------

def _human_flows():
    return [
        Scenario(
            scenario_id="human-opening",
            opening="I want to talk to a human",
            steps=[_s("human_handover", None, None)],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": False},
        ),
        Scenario(
            scenario_id="human-collecting",
            opening="exercise for Geometry",
            steps=[
                _s("ask_level", {"topic": "t05", "exam_mode": "exercise"},
                   "please connect me with a human"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": False},
        ),
        Scenario(
            scenario_id="human-intent-menu",
            opening="Hello!",
            steps=[
                _s("unknown_intent_menu", None, "human please"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": False},
        ),
        Scenario(
            scenario_id="human-verifying",
            opening="I am preparing for the final examination, chapter Geometry",
            steps=[
                _s("ask_question_number",
                   {"topic": "t05", "exam_mode": "final_examination"}, "4 a"),
                _s("final_request", {"question_number": "4a"},
                   "no wait, I want a human"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": True},
        ),
        Scenario(
            scenario_id="human-correcting-letter",
            opening="Final exam question in Complex Numbers",
            steps=[
                _s("ask_question_number",
                   {"topic": "t11", "exam_mode": "final_examination"}, "6 b"),
                _s("final_request", {"question_number": "6b"}, "no"),
                _s("verify_request", None, "human"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": True},
        ),
        Scenario(
            scenario_id="human-correcting-value",
            opening="Final exam question in Integral Calculus",
            steps=[
                _s("ask_question_number",
                   {"topic": "t08", "exam_mode": "final_examination"}, "2 d"),
                _s("final_request", {"question_number": "2d"}, "no"),
                _s("verify_request", None, "c"),
                _s("correct_request", None, "give me a human instead"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": True},
        ),
        Scenario(
            scenario_id="human-exact-question",
            opening="I am preparing for the final examination, chapter Angles",
            steps=[
                _s("ask_question_number", {"exam_mode": "final_examination"},
                   "8 e"),
                _s("final_request", {"question_number": "8e"}, "yes"),
                _s("exact_question", None,
                   "I would rather explain it to a human tutor"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "human_request",
                      "complete": True},
        ),
    ]


# -- verification corrections, one per letter ----------------------------------

def _correction_flows():
    def base_steps():
        return [
            _s("ask_level", {"topic": "t02", "exam_mode": "exercise"},
               "a specific section"),
            _s("ask_subtopic", {"exam_level": "section"},
               "Quadratic Equations"),
            _s("ask_question_number", {"subtopic": "t02-s2"}, "5 a"),
            _s("final_request", {"question_number": "5a"}, "no"),
        ]

    opening = "I am working on an exercise in Equations in One Variable"
    scenarios = [
        # a) chapter: correcting it drops the stale section and re-asks
        Scenario(
            scenario_id="correct-letter-a",
            opening=opening,
            steps=base_steps() + [
                _s("verify_request", None, "a"),
                _s("correct_request", None, "Complex Numbers"),
                _s("ask_subtopic", {"topic": "t11"}, "Polar Representation"),
                _s("final_request", {"subtopic": "t11-s2"}, "yes"),
                _s("exact_question", None, "part a eludes me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t11", "subtopic": "t11-s2", "exam_mode": "exercise",
                "exam_level": "section", "question_number": "5a",
            }),
        ),
        Scenario(
            scenario_id="correct-letter-b",
            opening=opening,
            steps=base_steps() + [
                _s("verify_request", None, "b"),
                _s("correct_request", None, "Linear Equations"),
                _s("final_request", {"subtopic": "t02-s1"}, "yes"),
                _s("exact_question", None, "part a eludes me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t02", "subtopic": "t02-s1", "exam_mode": "exercise",
                "exam_level": "section", "question_number": "5a",
            }),
        ),
        Scenario(
            scenario_id="correct-letter-c",
            opening=opening,
            steps=base_steps() + [
                _s("verify_request", None, "c"),
                _s("correct_request", None, "it is a training actually"),
                _s("final_request", {"exam_mode": "training"}, "yes"),
                _s("exact_question", None, "part a eludes me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t02", "subtopic": "t02-s2", "exam_mode": "training",
                "exam_level": "section", "question_number": "5a",
            }),
        ),
        Scenario(
            scenario_id="correct-letter-d",
            opening=opening,
            steps=base_steps() + [
                _s("verify_request", None, "d"),
                _s("correct_request", None, "12 b"),
                _s("final_request", {"question_number": "12b"}, "yes"),
                _s("exact_question", None, "part b eludes me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t02", "subtopic": "t02-s2", "exam_mode": "exercise",
                "exam_level": "section", "question_number": "12b",
            }),
        ),
        Scenario(
            scenario_id="correct-letter-e",
            opening=opening,
            steps=base_steps() + [
                _s("verify_request", None, "e"),
                _s("correct_request", None, "the whole chapter actually"),
                _s("final_request", {"exam_level": "chapter"}, "yes"),
                _s("exact_question", None, "part a eludes me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t02", "subtopic": "t02-s2", "exam_mode": "exercise",
                "exam_level": "chapter", "question_number": "5a",
            }),
        ),
        # correcting the mode can reopen collection (a level is now needed)
        Scenario(
            scenario_id="correct-mode-cascade",
            opening="Final exam question in Differential Calculus",
            steps=[
                _s("ask_question_number",
                   {"topic": "t07", "exam_mode": "final_examination"}, "3 c"),
                _s("final_request", {"question_number": "3c"}, "no"),
                _s("verify_request", None, "b"),
                _s("correct_request", None, "an exercise actually"),
                _s("ask_level", {"exam_mode": "exercise"}, "the whole chapter"),
                _s("final_request", {"exam_level": "chapter"}, "yes"),
                _s("exact_question", None, "it diverges for me"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t07", "exam_mode": "exercise",
                "exam_level": "chapter", "question_number": "3c",
            }),
        ),
        Scenario(
            scenario_id="correct-two-letters",
            opening=opening,
            steps=base_steps() + [
                _s("verify_request", None, "d"),
                _s("correct_request", None, "12 b"),
                _s("final_request", {"question_number": "12b"}, "no"),
                _s("verify_request", None, "e"),
                _s("correct_request", None, "the whole chapter"),
                _s("final_request", {"exam_level": "chapter"}, "yes"),
                _s("exact_question", None, "see my notes"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t02", "subtopic": "t02-s2", "exam_mode": "exercise",
                "exam_level": "chapter", "question_number": "12b",
            }),
        ),
    ]
    return scenarios


# -- organisational / contextual routing ---------------------------------------

def _routing_flows(catalog):
    return [
        Scenario(
            scenario_id="route-organizational",
            opening="Where can I change my account email?",
            steps=[
                _s("org_ack", None, "I also need a new password"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "summary_provided",
                      "complete": False},
        ),
        Scenario(
            scenario_id="route-contextual",
            opening="Why does the chain rule work that way?",
            steps=[
                _s("context_ack", None, "I do not understand the proof"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "summary_provided",
                      "complete": False},
        ),
        Scenario(
            scenario_id="route-menu-org",
            opening="Good evening!",
            steps=[
                _s("unknown_intent_menu", None, "org"),
                _s("org_ack", None, "When is the registration deadline?"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "summary_provided",
                      "complete": False},
        ),
        Scenario(
            scenario_id="route-menu-text",
            opening="Hello there",
            steps=[
                _s("unknown_intent_menu", None, "text"),
                _s("context_ack", None, "What does bijective mean?"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "summary_provided",
                      "complete": False},
        ),
        Scenario(
            scenario_id="route-menu-math",
            opening="Hi!",
            steps=[
                _s("unknown_intent_menu", None, "math"),
                _s("ask_topic", None, "Descriptive Statistics"),
                _s("ask_exam_mode", {"topic": "t13"}, "quiz"),
                _s("ask_subtopic", {"exam_mode": "quiz"},
                   "Measures of Dispersion"),
                _s("ask_question_number", {"subtopic": "t13-s2"}, "8 a"),
                _s("final_request", {"question_number": "8a"}, "yes"),
                _s("exact_question", None, "the variance formula"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t13", "subtopic": "t13-s2", "exam_mode": "quiz",
                "question_number": "8a",
            }),
        ),
        Scenario(
            scenario_id="menu-strikeout",
            opening="Hello!",
            steps=[
                _s("unknown_intent_menu", None, "qwxy"),
                _s("unknown_intent_menu", None, "zzzz"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "unclassified_intent",
                      "complete": False},
        ),
        Scenario(
            scenario_id="menu-recover-with-slots",
            opening="anyone there?",
            steps=[
                _s("unknown_intent_menu", None, "Chapter Geometry, quiz"),
                _s("ask_subtopic", {"topic": "t05", "exam_mode": "quiz"},
                   "Angles"),
                _s("ask_question_number", {"subtopic": "t05-s1"}, "1 a"),
                _s("final_request", {"question_number": "1a"}, "yes"),
                _s("exact_question", None, "the alternate angle"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t05", "subtopic": "t05-s1", "exam_mode": "quiz",
                "question_number": "1a",
            }),
        ),
    ]


# -- misspelled openings at edit distances 1, 2, and 3 --------------------------

def _typo_flows():
    resolving = [
        ("d1", "Geomtry", "t05"),
        ("d1", "Elementry Calculus", "t01"),
        ("d1", "Complex Numers", "t11"),
        ("d1", "Probabilty Calculus", "t12"),
        ("d1", "Integral Calclus", "t08"),
        ("d1", "Diferential Calculus", "t07"),
        ("d2", "Geometyr", "t05"),
        ("d2", "Elemntary Calculus", "t01"),
        ("d2", "Komplexe Zalhen", "t11"),
        ("d2", "Integarl Calculus", "t08"),
        ("d2", "Probbaility Calculus", "t12"),
        ("d2", "Descriptive Statitsics", "t13"),
    ]
    scenarios = []
    for i, (dist, text, topic_id) in enumerate(resolving):
        qnr_text, canon, n, letter = _qnr(i)
        slug = text.split()[0].lower()
        steps = [
            _s("ask_level", {"topic": topic_id, "exam_mode": "exercise"},
               "the whole chapter"),
            _s("ask_question_number", {"exam_level": "chapter"}, qnr_text),
        ]
        steps += _closing(i, n, letter, {"question_number": canon})
        scenarios.append(Scenario(
            scenario_id=f"typo-{dist}-{slug}",
            opening=f"I am working on an exercise in {text}",
            steps=steps,
            terminal=_terminal({
                "topic": topic_id, "exam_mode": "exercise",
                "exam_level": "chapter", "question_number": canon,
            }),
        ))
    # three edits away: must NOT resolve; the ask recovers the dialogue
    scenarios.append(Scenario(
        scenario_id="typo-d3-gmtry",
        opening="I am working on an exercise in Gmtry",
        steps=[
            _s("ask_topic", {"exam_mode": "exercise"}, "Geometry"),
            _s("ask_level", {"topic": "t05"}, "the whole chapter"),
            _s("ask_question_number", {"exam_level": "chapter"}, "3 b"),
            _s("final_request", {"question_number": "3b"}, "yes"),
            _s("exact_question", None, "the sketch is wrong"),
            _s("human_handover", None, None),
        ],
        terminal=_terminal({
            "topic": "t05", "exam_mode": "exercise", "exam_level": "chapter",
            "question_number": "3b",
        }),
    ))
    scenarios.append(Scenario(
        scenario_id="typo-d3-elemntray",
        opening="training on Elemntray Calcls please",
        steps=[
            _s("ask_topic", {"exam_mode": "training"}, "Elementary Calculus"),
            _s("ask_level", {"topic": "t01"}, "the whole chapter"),
            _s("ask_question_number", {"exam_level": "chapter"}, "6 d"),
            _s("final_request", {"question_number": "6d"}, "yes"),
            _s("exact_question", None, "the powers will not cancel"),
            _s("human_handover", None, None),
        ],
        terminal=_terminal({
            "topic": "t01", "exam_mode": "training", "exam_level": "chapter",
            "question_number": "6d",
        }),
    ))
    scenarios.append(Scenario(
        scenario_id="typo-d1-subtopic",
        opening="I am working on an exercise in Integral Calculus",
        steps=[
            _s("ask_level", {"topic": "t08", "exam_mode": "exercise"},
               "a specific section"),
            _s("ask_subtopic", {"exam_level": "section"}, "Antiderivativs"),
            _s("ask_question_number", {"subtopic": "t08-s1"}, "2 a"),
            _s("final_request", {"question_number": "2a"}, "yes"),
            _s("exact_question", None, "which rule applies here"),
            _s("human_handover", None, None),
        ],
        terminal=_terminal({
            "topic": "t08", "subtopic": "t08-s1", "exam_mode": "exercise",
            "exam_level": "section", "question_number": "2a",
        }),
    ))
    return scenarios


# -- question number formats ----------------------------------------------------

def _qnr_format_flows():
    scenarios = []
    formats = [
        ("spaced", "5 a", "5a"),
        ("joined", "5a", "5a"),
        ("paren", "5 (a)", "5a"),
        ("dotted", "5.a", "5a"),
        ("worded", "number 5 a", "5a"),
        ("bare", "5", "5"),
    ]
    for name, reply, canon in formats:
        scenarios.append(Scenario(
            scenario_id=f"qnr-format-{name}",
            opening="Final exam question in Inequalities in One Variable",
            steps=[
                _s("ask_question_number",
                   {"topic": "t03", "exam_mode": "final_examination"}, reply),
                _s("final_request", {"question_number": canon}, "yes"),
                _s("exact_question", None, "the sign flip"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t03", "exam_mode": "final_examination",
                "question_number": canon,
            }),
        ))
    scenarios.append(Scenario(
        scenario_id="qnr-format-prefixed",
        opening="I am working on an exercise in Linear Systems of Equations",
        steps=[
            _s("ask_level", {"topic": "t04", "exam_mode": "exercise"},
               "the whole chapter"),
            _s("ask_question_number", {"exam_level": "chapter"},
               "Exercise 5 (a)"),
            _s("final_request", {"question_number": "5a"}, "yes"),
            _s("exact_question", None, "the matrix will not reduce"),
            _s("human_handover", None, None),
        ],
        terminal=_terminal({
            "topic": "t04", "exam_mode": "exercise", "exam_level": "chapter",
            "question_number": "5a",
        }),
    ))
    return scenarios


# -- verification breakdowns and recovery ---------------------------------------

def _verification_flows():
    return [
        Scenario(
            scenario_id="verify-3strike",
            opening="Final exam question in Elementary Functions",
            steps=[
                _s("ask_question_number",
                   {"topic": "t06", "exam_mode": "final_examination"}, "1 b"),
                _s("final_request", {"question_number": "1b"}, "maybe"),
                _s("final_request", None, "perhaps"),
                _s("final_request", None, "hard to say"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "verification_failed",
                      "complete": True},
        ),
        Scenario(
            scenario_id="verify-letter-3strike",
            opening="Final exam question in Combinatorics",
            steps=[
                _s("ask_question_number", {"exam_mode": "final_examination"},
                   "7 a"),
                _s("final_request", {"question_number": "7a"}, "no"),
                _s("verify_request", None, "z"),
                _s("verify_request", None, "x!"),
                _s("verify_request", None, "w?"),
                _s("human_handover", None, None),
            ],
            terminal={"outcome": "handover", "reason": "verification_failed",
                      "complete": True},
        ),
        Scenario(
            scenario_id="verify-recover",
            opening="Final exam question in Descriptive Vector Geometry",
            steps=[
                _s("ask_question_number",
                   {"topic": "t09", "exam_mode": "final_examination"}, "2 e"),
                _s("final_request", {"question_number": "2e"}, "hmm"),
                _s("final_request", None, "give me a moment"),
                _s("final_request", None, "yes"),
                _s("exact_question", None, "the cross product sign"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t09", "exam_mode": "final_examination",
                "question_number": "2e",
            }),
        ),
    ]


# -- conversation history and mid-dialogue revisions -----------------------------

def _context_flows():
    return [
        # "roots and powers" alone ties two sections; the chapter mentioned
        # earlier in the conversation tips the scale
        Scenario(
            scenario_id="history-section",
            opening="I am doing an exercise on Elementary Calculus",
            steps=[
                _s("ask_level", {"topic": "t01", "exam_mode": "exercise"},
                   "a specific section"),
                _s("ask_subtopic", {"exam_level": "section"},
                   "the one on roots and powers"),
                _s("ask_question_number", {"subtopic": "t01-s3"}, "9 a"),
                _s("final_request", {"question_number": "9a"}, "yes"),
                _s("exact_question", None, "stuck on 9a"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t01", "subtopic": "t01-s3", "exam_mode": "exercise",
                "exam_level": "section", "question_number": "9a",
            }),
        ),
        # naming a section of another chapter moves the whole ticket there
        Scenario(
            scenario_id="history-chapter-switch",
            opening="I am working on an exercise in Geometry",
            steps=[
                _s("ask_level", {"topic": "t05", "exam_mode": "exercise"},
                   "a specific section"),
                _s("ask_subtopic", {"exam_level": "section"},
                   "actually it is Polar Representation"),
                _s("ask_question_number",
                   {"topic": "t11", "subtopic": "t11-s2"}, "2 b"),
                _s("final_request", {"question_number": "2b"}, "yes"),
                _s("exact_question", None, "the angle conversion"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t11", "subtopic": "t11-s2", "exam_mode": "exercise",
                "exam_level": "section", "question_number": "2b",
            }),
        ),
        # newest information wins mid-collection
        Scenario(
            scenario_id="switch-mode-mid",
            opening="I am doing a training on Triangles",
            steps=[
                _s("ask_level",
                   {"topic": "t05", "subtopic": "t05-s2",
                    "exam_mode": "training"},
                   "actually make it an exercise, whole chapter please"),
                _s("ask_question_number",
                   {"exam_mode": "exercise", "exam_level": "chapter"}, "6 c"),
                _s("final_request", {"question_number": "6c"}, "yes"),
                _s("exact_question", None, "the height computation"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t05", "subtopic": "t05-s2", "exam_mode": "exercise",
                "exam_level": "chapter", "question_number": "6c",
            }),
        ),
        Scenario(
            scenario_id="switch-topic-mid",
            opening="exercise on Geometry",
            steps=[
                _s("ask_level", {"topic": "t05", "exam_mode": "exercise"},
                   "section level for Complex Numbers actually"),
                _s("ask_subtopic",
                   {"topic": "t11", "exam_level": "section"},
                   "Cartesian Representation"),
                _s("ask_question_number", {"subtopic": "t11-s1"}, "4 c"),
                _s("final_request", {"question_number": "4c"}, "yes"),
                _s("exact_question", None, "the imaginary part"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t11", "subtopic": "t11-s1", "exam_mode": "exercise",
                "exam_level": "section", "question_number": "4c",
            }),
        ),
    ]


# -- German-language dialogues ----------------------------------------------------

def _german_flows():
    return [
        Scenario(
            scenario_id="de-exercise-chapter",
            opening="Ich brauche Hilfe bei Komplexe Zahlen, Übung bitte",
            steps=[
                _s("ask_level", {"topic": "t11", "exam_mode": "exercise"},
                   "ganzes Kapitel"),
                _s("ask_question_number", {"exam_level": "chapter"},
                   "Aufgabe 3 b"),
                _s("final_request", {"question_number": "3b"}, "ja"),
                _s("exact_question", None, "Wie löse ich das?"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t11", "exam_mode": "exercise",
                "exam_level": "chapter", "question_number": "3b",
            }),
        ),
        Scenario(
            scenario_id="de-quiz",
            opening="Hilfe beim Quiz zu Geometrie bitte",
            steps=[
                _s("ask_subtopic", {"topic": "t05", "exam_mode": "quiz"},
                   "Dreiecke"),
                _s("ask_question_number", {"subtopic": "t05-s2"},
                   "Nummer 2 b"),
                _s("final_request", {"question_number": "2b"}, "genau"),
                _s("exact_question", None, "Teil b verstehe ich nicht"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t05", "subtopic": "t05-s2", "exam_mode": "quiz",
                "question_number": "2b",
            }),
        ),
        Scenario(
            scenario_id="de-training-section",
            opening="Trainingsaufgabe für Lineare Gleichungen",
            steps=[
                _s("ask_level",
                   {"topic": "t02", "subtopic": "t02-s1",
                    "exam_mode": "training"},
                   "Abschnitt"),
                _s("ask_question_number", {"exam_level": "section"}, "7 a"),
                _s("final_request", {"question_number": "7a"}, "ja"),
                _s("exact_question", None, "Schritt zwei ist unklar"),
                _s("human_handover", None, None),
            ],
            terminal=_terminal({
                "topic": "t02", "subtopic": "t02-s1", "exam_mode": "training",
                "exam_level": "section", "question_number": "7a",
            }),
        ),
    ]


# -- assembly ----------------------------------------------------------------------

def build_scenarios(catalog=None) -> list:
    """The full authored corpus; ids are unique and the list is stable."""
    catalog = catalog or load_catalog()
    scenarios = []
    scenarios += _chapter_level_flows(catalog, "training", (
        "I need help with {title}, we are doing a training",
        "Hi, I am stuck on the training for chapter {title}",
        "My training on {title} is giving me trouble",
    ))
    scenarios += _section_level_flows(catalog, "training", (
        "I need help with {title}, we are doing a training",
        "Hi, I am stuck on the training for chapter {title}",
        "My training on {title} is giving me trouble",
    ), variant=0)
    scenarios += _chapter_level_flows(catalog, "exercise", (
        "I am working on an exercise in {title}",
        "Exercise question about {title}",
        "I can't do the exercise for {title}",
    ))
    scenarios += _section_level_flows(catalog, "exercise", (
        "I am working on an exercise in {title}",
        "Exercise question about {title}",
        "I can't do the exercise for {title}",
    ), variant=1)
    scenarios += _quiz_flows(catalog)
    scenarios += _final_exam_flows(catalog)
    scenarios += _all_asks_flows(catalog)
    scenarios += _permalink_flows(catalog)
    scenarios += _strike_flows(catalog)
    scenarios += _human_flows()
    scenarios += _correction_flows()
    scenarios += _routing_flows(catalog)
    scenarios += _typo_flows()
    scenarios += _qnr_format_flows()
    scenarios += _verification_flows()
    scenarios += _context_flows()
    scenarios += _german_flows()

    ids = [s.scenario_id for s in scenarios]
    if len(ids) != len(set(ids)):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate scenario ids: {dupes}")
    for s in scenarios:
        s.validate()
    return scenarios


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="write the authored scenario corpus to a JSON file")
    parser.add_argument("--out", default="scenarios.json",
                        help="output path (default: ./scenarios.json)")
    args = parser.parse_args(argv)
    scenarios = build_scenarios()
    save_scenarios(scenarios, args.out)
    print(f"wrote {len(scenarios)} scenarios to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
