"""Learnable stand-ins for the rule engine's decisions.

Two models are trained on logged dialogues: a next-action classifier
(predicting which act the engine takes after a user message) and a
per-token entity tagger. Both are linear perceptron-family models --
small, dependency-free and deterministic -- so the data pipeline and
metrics can be exercised end to end.
"""

from tutordesk.learned.dataset import Example, LabeledDataset, build_dataset
from tutordesk.learned.metrics import (
    average_dialogue_accuracy,
    evaluate,
    macro_f1,
)
from tutordesk.learned.nap import NapModel, predict_nap, train_nap
from tutordesk.learned.ner import NerModel, predict_ner, train_ner

__all__ = [
    "Example",
    "LabeledDataset",
    "NapModel",
    "NerModel",
    "average_dialogue_accuracy",
    "build_dataset",
    "evaluate",
    "macro_f1",
    "predict_nap",
    "predict_ner",
    "train_nap",
    "train_ner",
]
