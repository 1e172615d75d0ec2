"""Evaluation metrics for the learned units.

Macro F1 is the unweighted mean of per-class F1 over the classes that
occur in gold or predictions: a class that is predicted but never gold
counts as 0, a class absent from both is excluded. Average dialogue
accuracy is the mean over dialogues of the per-dialogue fraction of
correctly predicted next actions.

Every evaluation also emits a small confusion report: the most
frequently confused action pairs and the count of entity tag errors
that sit on span boundaries (first/last token of a gold entity span).
"""

from collections import Counter, defaultdict

from tutordesk.learned.nap import predict_example
from tutordesk.learned.ner import predict_ner


def confusion_matrix(gold: list, predicted: list) -> dict:
    """(gold, predicted) pair counts."""
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted lengths differ")
    matrix = Counter(zip(gold, predicted))
    return dict(matrix)


def per_class_f1(matrix: dict) -> dict:
    """Class -> (precision, recall, f1) from a (gold, pred) count matrix."""
    classes = set()
    for g, p in matrix:
        classes.add(g)
        classes.add(p)
    out = {}
    for cls in sorted(classes):
        tp = matrix.get((cls, cls), 0)
        fp = sum(v for (g, p), v in matrix.items() if p == cls and g != cls)
        fn = sum(v for (g, p), v in matrix.items() if g == cls and p != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        out[cls] = (precision, recall, f1)
    return out


def macro_f1(gold: list, predicted: list) -> float:
    """Unweighted mean F1 over classes present in gold or predictions."""
    scores = per_class_f1(confusion_matrix(gold, predicted))
    if not scores:
        return 0.0
    return sum(f1 for _, _, f1 in scores.values()) / len(scores)


def average_dialogue_accuracy(examples: list, predictions: list) -> float:
    """Mean over dialogues of (correct next actions / turns)."""
    if len(examples) != len(predictions):
        raise ValueError("examples and predictions lengths differ")
    per_dialogue = defaultdict(lambda: [0, 0])
    for ex, pred in zip(examples, predictions):
        bucket = per_dialogue[ex.dialogue_id]
        bucket[0] += 1 if pred == ex.action else 0
        bucket[1] += 1
    if not per_dialogue:
        return 0.0
    return sum(c / n for c, n in per_dialogue.values()) / len(per_dialogue)


def _confused_pairs(matrix: dict, top: int = 5) -> list:
    pairs = [
        {"gold": g, "predicted": p, "count": v}
        for (g, p), v in matrix.items()
        if g != p
    ]
    pairs.sort(key=lambda r: (-r["count"], r["gold"], r["predicted"]))
    return pairs[:top]


def _boundary_errors(examples: list, tag_predictions: list) -> int:
    """Tag errors on the first or last token of a gold entity span."""
    count = 0
    for ex, pred in zip(examples, tag_predictions):
        n = len(ex.tags)
        for i, (gold_tag, pred_tag) in enumerate(zip(ex.tags, pred)):
            if gold_tag == "other" or gold_tag == pred_tag:
                continue
            starts = i == 0 or ex.tags[i - 1] != gold_tag
            ends = i == n - 1 or ex.tags[i + 1] != gold_tag
            if starts or ends:
                count += 1
    return count


def evaluate(ds, nap_model=None, ner_model=None, split: str = "test") -> dict:
    """Run the trained models over one split and report all metrics."""
    examples = ds.examples(split)
    if not examples:
        raise ValueError(f"dataset has no {split} split")
    report = {"split": split, "examples": len(examples),
              "dialogues": len({ex.dialogue_id for ex in examples})}

    if nap_model is not None:
        gold = [ex.action for ex in examples]
        predicted = [predict_example(nap_model, ex) for ex in examples]
        matrix = confusion_matrix(gold, predicted)
        report["nap"] = {
            "setting": nap_model.setting,
            "macro_f1": macro_f1(gold, predicted),
            "accuracy": sum(g == p for g, p in zip(gold, predicted)) / len(gold),
            "dialogue_accuracy": average_dialogue_accuracy(examples, predicted),
            "confused_pairs": _confused_pairs(matrix),
        }

    if ner_model is not None:
        tag_predictions = [predict_ner(ner_model, ex.tokens) for ex in examples]
        gold_tags = [t for ex in examples for t in ex.tags]
        pred_tags = [t for pred in tag_predictions for t in pred]
        report["ner"] = {
            "macro_f1": macro_f1(gold_tags, pred_tags),
            "token_accuracy": (sum(g == p for g, p in zip(gold_tags, pred_tags))
                               / len(gold_tags) if gold_tags else 0.0),
            "boundary_errors": _boundary_errors(examples, tag_predictions),
        }
    return report
