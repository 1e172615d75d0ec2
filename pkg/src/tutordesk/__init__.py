"""tutordesk - a slot-filling support-ticket dialogue engine for e-learning.

The engine collects the information a human tutor needs (topic, sub-topic,
examination mode and level, question number, exact question) through a
rule-generated dialogue policy, verifies it with the student, hands the
completed ticket over, and logs every conversation as structured training
data. Ships with a fuzzy catalog search, a self-chat evaluation harness and
small trainable next-action / entity-tagging baselines.
"""

__version__ = "0.1.0"

from tutordesk.engine import Engine  # noqa: F401
