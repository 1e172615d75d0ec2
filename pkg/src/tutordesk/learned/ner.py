"""Entity tagging: an averaged structured perceptron with Viterbi decoding.

Each token is scored against the 7-tag set from emission features
(identity, shape, affixes, digit flags, neighbors, catalog-gazetteer
membership) plus a first-order transition table; the best tag sequence
is found by dynamic programming.
"""

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field

from tutordesk.catalog import load_catalog
from tutordesk.export import ENTITY_TAGS
from tutordesk.learned.dataset import tokenize

EPOCHS = 6
_GAZETTEER_KINDS = ("topic", "subtopic", "exam_mode")


def _shape(tok: str) -> str:
    out = []
    for ch in tok:
        if ch.isdigit():
            mark = "d"
        elif ch.isalpha():
            mark = "X" if ch.isupper() else "x"
        else:
            mark = "-"
        if not out or out[-1] != mark:
            out.append(mark)
    return "".join(out)


def build_gazetteer(catalog=None) -> dict:
    """word -> set of catalog kinds whose titles/synonyms contain it."""
    catalog = catalog or load_catalog()
    gaz = defaultdict(set)
    for entry in catalog.entries:
        if entry.kind not in _GAZETTEER_KINDS:
            continue
        names = (entry.title,) + tuple(entry.synonyms)
        for name in names:
            for word in name.lower().split():
                if len(word) >= 3:
                    gaz[word].add(entry.kind)
    return {w: sorted(kinds) for w, kinds in gaz.items()}


def token_features(tokens: list, i: int, gazetteer: dict) -> list:
    tok = tokens[i]
    low = tok.lower()
    feats = [
        f"w={low}",
        f"shape={_shape(tok)}",
        f"pre={low[:3]}",
        f"suf={low[-3:]}",
    ]
    if low.isdigit():
        feats.append("isdigit")
    if len(tok) == 1 and tok.isalpha():
        feats.append("single-letter")
    prev = tokens[i - 1].lower() if i > 0 else "<s>"
    nxt = tokens[i + 1].lower() if i + 1 < len(tokens) else "</s>"
    feats.append(f"prev={prev}")
    feats.append(f"next={nxt}")
    if prev.isdigit():
        feats.append("prev-digit")
    for kind in gazetteer.get(low, ()):
        feats.append(f"gaz={kind}")
    for kind in gazetteer.get(prev, ()):
        feats.append(f"gaz-prev={kind}")
    for kind in gazetteer.get(nxt, ()):
        feats.append(f"gaz-next={kind}")
    return feats


@dataclass
class NerModel:
    """Emission weights per tag plus a first-order transition table."""

    emissions: dict = field(default_factory=dict)  # tag -> {feature: weight}
    transitions: dict = field(default_factory=dict)  # "prev tag" -> weight
    tags: tuple = ENTITY_TAGS
    gazetteer: dict = field(default_factory=dict)
    tokenizer: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "emissions": {t: dict(w) for t, w in self.emissions.items()},
            "transitions": dict(self.transitions),
            "tags": list(self.tags),
            "gazetteer": self.gazetteer,
            "tokenizer": self.tokenizer,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NerModel":
        return cls(
            emissions={t: dict(w) for t, w in data["emissions"].items()},
            transitions=dict(data["transitions"]),
            tags=tuple(data["tags"]),
            gazetteer={w: list(k) for w, k in data["gazetteer"].items()},
            tokenizer=data.get("tokenizer", {}),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "NerModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


_START = "<s>"


def _trans_key(prev_tag: str, tag: str) -> str:
    return f"{prev_tag} {tag}"


def _viterbi(tokens, tags, emissions, transitions, gazetteer):
    if not tokens:
        return []
    n = len(tokens)
    score = [{} for _ in range(n)]
    back = [{} for _ in range(n)]
    for i in range(n):
        feats = token_features(tokens, i, gazetteer)
        for tag in tags:  # fixed order makes ties deterministic
            w = emissions.get(tag, {})
            emit = sum(w.get(f, 0.0) for f in feats)
            if i == 0:
                score[0][tag] = emit + transitions.get(_trans_key(_START, tag), 0.0)
                back[0][tag] = None
            else:
                best_prev, best = None, None
                for prev_tag in tags:
                    s = (score[i - 1][prev_tag]
                         + transitions.get(_trans_key(prev_tag, tag), 0.0))
                    if best is None or s > best:
                        best_prev, best = prev_tag, s
                score[i][tag] = best + emit
                back[i][tag] = best_prev
    last = max(tags, key=lambda t: score[n - 1][t])
    path = [last]
    for i in range(n - 1, 0, -1):
        path.append(back[i][path[-1]])
    path.reverse()
    return path


def train_ner(ds, seed: int = 0, epochs: int = EPOCHS, catalog=None) -> NerModel:
    """Averaged structured perceptron over the train split."""
    examples = ds.examples("train")
    if not examples:
        raise ValueError("dataset has no train split")
    gazetteer = build_gazetteer(catalog)
    tags = tuple(ds.tags)

    emissions = {t: defaultdict(float) for t in tags}
    em_tot = {t: defaultdict(float) for t in tags}
    em_st = {t: defaultdict(int) for t in tags}
    transitions = defaultdict(float)
    tr_tot = defaultdict(float)
    tr_st = defaultdict(int)
    rng = random.Random(seed)
    order = list(examples)
    step = 0

    def bump_emit(tag, feats, delta):
        w, tot, st = emissions[tag], em_tot[tag], em_st[tag]
        for f in feats:
            tot[f] += (step - st[f]) * w[f]
            st[f] = step
            w[f] += delta

    def bump_trans(key, delta):
        tr_tot[key] += (step - tr_st[key]) * transitions[key]
        tr_st[key] = step
        transitions[key] += delta

    for _ in range(epochs):
        rng.shuffle(order)
        for ex in order:
            if not ex.tokens:
                step += 1
                continue
            guess = _viterbi(ex.tokens, tags, emissions, transitions, gazetteer)
            if guess != ex.tags:
                prev_gold, prev_guess = _START, _START
                for i, (gold_tag, guess_tag) in enumerate(zip(ex.tags, guess)):
                    feats = token_features(ex.tokens, i, gazetteer)
                    if gold_tag != guess_tag:
                        bump_emit(gold_tag, feats, +1.0)
                        bump_emit(guess_tag, feats, -1.0)
                    gold_key = _trans_key(prev_gold, gold_tag)
                    guess_key = _trans_key(prev_guess, guess_tag)
                    if gold_key != guess_key:
                        bump_trans(gold_key, +1.0)
                        bump_trans(guess_key, -1.0)
                    prev_gold, prev_guess = gold_tag, guess_tag
            step += 1

    avg_emissions = {}
    for tag in tags:
        w, tot, st = emissions[tag], em_tot[tag], em_st[tag]
        avg_emissions[tag] = {
            f: (tot[f] + (step - st[f]) * w[f]) / step
            for f in w
            if tot[f] + (step - st[f]) * w[f] != 0.0
        }
    avg_transitions = {
        k: (tr_tot[k] + (step - tr_st[k]) * transitions[k]) / step
        for k in transitions
        if tr_tot[k] + (step - tr_st[k]) * transitions[k] != 0.0
    }
    return NerModel(
        emissions=avg_emissions,
        transitions=avg_transitions,
        tags=tags,
        gazetteer=gazetteer,
        tokenizer=ds.tokenizer.to_dict(),
    )


def predict_ner(model: NerModel, utterance) -> list:
    """Per-token tags for an utterance (text or token list)."""
    if isinstance(utterance, str):
        from tutordesk.learned.dataset import TokenizerConfig

        cfg = TokenizerConfig.from_dict(model.tokenizer) if model.tokenizer else None
        tokens = [t[0] for t in tokenize(utterance, cfg)]
    else:
        tokens = list(utterance)
    return _viterbi(tokens, model.tags, model.emissions, model.transitions,
                    model.gazetteer)
