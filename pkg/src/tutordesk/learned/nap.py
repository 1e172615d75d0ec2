"""Next-action prediction: an averaged multi-class perceptron.

Features are a bag of tokens plus a bias; the extended setting adds
exactly one categorical feature, the previous system action. Tokens
seen fewer than twice in training fold into an out-of-vocabulary
bucket so unseen words at prediction time share its weight.
"""

import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from tutordesk.learned.dataset import START_ACTION, Example, tokenize

OOV = "<oov>"
BIAS = "<bias>"
MIN_TOKEN_COUNT = 2
EPOCHS = 8


@dataclass
class NapModel:
    """Per-class weight vectors over sparse features."""

    weights: dict = field(default_factory=dict)  # class -> {feature: weight}
    vocab: set = field(default_factory=set)
    labels: tuple = ()
    setting: str = "default"
    majority: str = ""
    tokenizer: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "weights": {c: dict(w) for c, w in self.weights.items()},
            "vocab": sorted(self.vocab),
            "labels": list(self.labels),
            "setting": self.setting,
            "majority": self.majority,
            "tokenizer": self.tokenizer,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NapModel":
        return cls(
            weights={c: dict(w) for c, w in data["weights"].items()},
            vocab=set(data["vocab"]),
            labels=tuple(data["labels"]),
            setting=data["setting"],
            majority=data["majority"],
            tokenizer=data.get("tokenizer", {}),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "NapModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _features(tokens: list, prev_action: str, vocab: set, setting: str) -> Counter:
    feats = Counter()
    for tok in tokens:
        key = tok.lower()
        feats[f"tok={key if key in vocab else OOV}"] += 1
    feats[BIAS] += 1
    if setting == "extended":
        feats[f"prev={prev_action}"] += 1
    return feats


def _score(weights: dict, feats: Counter) -> float:
    return sum(weights.get(f, 0.0) * v for f, v in feats.items())


def _argmax(weights_by_label: dict, labels: tuple, feats: Counter) -> str:
    best, best_score = None, None
    for label in labels:  # fixed order makes ties deterministic
        s = _score(weights_by_label[label], feats)
        if best_score is None or s > best_score:
            best, best_score = label, s
    return best


def train_nap(ds, setting: str = "default", seed: int = 0,
              epochs: int = EPOCHS) -> NapModel:
    """Averaged perceptron over the train split."""
    if setting not in ("default", "extended"):
        raise ValueError(f"unknown NAP setting: {setting}")
    examples = ds.examples("train")
    if not examples:
        raise ValueError("dataset has no train split")

    counts = Counter(t.lower() for ex in examples for t in ex.tokens)
    vocab = {t for t, c in counts.items() if c >= MIN_TOKEN_COUNT}
    labels = tuple(ds.actions)
    majority = Counter(ex.action for ex in examples).most_common(1)[0][0]

    weights = {label: defaultdict(float) for label in labels}
    totals = {label: defaultdict(float) for label in labels}
    stamps = {label: defaultdict(int) for label in labels}
    rng = random.Random(seed)
    order = list(examples)
    step = 0

    def bump(label, feats, delta):
        w, tot, st = weights[label], totals[label], stamps[label]
        for f, v in feats.items():
            tot[f] += (step - st[f]) * w[f]
            st[f] = step
            w[f] += delta * v

    for _ in range(epochs):
        rng.shuffle(order)
        for ex in order:
            feats = _features(ex.tokens, ex.prev_action, vocab, setting)
            guess = _argmax(weights, labels, feats)
            if guess != ex.action:
                bump(ex.action, feats, +1.0)
                bump(guess, feats, -1.0)
            step += 1

    averaged = {}
    for label in labels:
        w, tot, st = weights[label], totals[label], stamps[label]
        averaged[label] = {
            f: (tot[f] + (step - st[f]) * w[f]) / step
            for f in w
            if tot[f] + (step - st[f]) * w[f] != 0.0
        }
    return NapModel(
        weights=averaged,
        vocab=vocab,
        labels=labels,
        setting=setting,
        majority=majority,
        tokenizer=ds.tokenizer.to_dict(),
    )


def predict_nap(model: NapModel, utterance, prev_action: str = None) -> str:
    """Predict the next action for an utterance (text or token list)."""
    if isinstance(utterance, str):
        from tutordesk.learned.dataset import TokenizerConfig

        cfg = TokenizerConfig.from_dict(model.tokenizer) if model.tokenizer else None
        tokens = [t[0] for t in tokenize(utterance, cfg)]
    else:
        tokens = list(utterance)
    if not tokens:
        # featureless input: fall back to the training majority class
        return model.majority
    prev = prev_action if prev_action is not None else START_ACTION
    feats = _features(tokens, prev, model.vocab, model.setting)
    return _argmax(model.weights, model.labels, feats)


def predict_example(model: NapModel, ex: Example) -> str:
    return predict_nap(model, ex.tokens, ex.prev_action)
