"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from first principles -- full
matrices instead of rolling rows, direct set arithmetic instead of
generated rule lists, flat loops instead of inverted indexes -- so that
agreement with the package is evidence, not tautology.
"""

import math


# -- edit distance ------------------------------------------------------------

def dp_levenshtein(a: str, b: str) -> int:
    """Textbook full-matrix dynamic program."""
    rows, cols = len(a) + 1, len(b) + 1
    matrix = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        matrix[i][0] = i
    for j in range(cols):
        matrix[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            substitution = matrix[i - 1][j - 1] + (0 if a[i - 1] == b[j - 1] else 1)
            deletion = matrix[i - 1][j] + 1
            insertion = matrix[i][j - 1] + 1
            matrix[i][j] = min(substitution, deletion, insertion)
    return matrix[rows - 1][cols - 1]


# -- dialogue-state validity --------------------------------------------------

CURRENT_FLAGS = (
    "topic", "sub_topic",
    "training", "exercise", "quiz", "final_examination",
    "chapter_level", "section_level",
    "question_number",
)
LEGACY_FLAGS = CURRENT_FLAGS[:2] + ("sub_sub_topic",) + CURRENT_FLAGS[2:]

MODES = ("training", "exercise", "quiz", "final_examination")
LEVELED_MODES = ("training", "exercise")


def state_is_coherent(flags: frozenset) -> bool:
    """Validity rules, re-stated as plain set logic:

    at most one examination mode; at most one level; a level flag
    requires exactly one mode and that mode must distinguish levels.
    """
    modes = [m for m in MODES if m in flags]
    if len(modes) > 1:
        return False
    levels = [lvl for lvl in ("chapter_level", "section_level") if lvl in flags]
    if len(levels) > 1:
        return False
    if levels and (len(modes) != 1 or modes[0] not in LEVELED_MODES):
        return False
    return True


def enumerate_coherent(flag_names) -> list:
    """All coherent flag subsets, by direct 2^n enumeration."""
    out = []
    n = len(flag_names)
    for bits in range(1 << n):
        flags = frozenset(
            name for i, name in enumerate(flag_names) if bits >> i & 1
        )
        if state_is_coherent(flags):
            out.append(flags)
    return out


def reference_next_question(flags: frozenset, deep: bool = False):
    """First unmet requirement, checked in the documented order."""
    modes = [m for m in MODES if m in flags]
    mode = modes[0] if len(modes) == 1 else None
    if "topic" not in flags and "sub_topic" not in flags:
        return "ask_topic"
    if mode is None:
        return "ask_exam_mode"
    if mode in LEVELED_MODES and not (
            "chapter_level" in flags or "section_level" in flags):
        return "ask_level"
    if "sub_topic" not in flags and "topic" in flags and (
            mode == "quiz" or "section_level" in flags):
        return "ask_subtopic"
    if deep and "sub_sub_topic" not in flags and "sub_topic" in flags \
            and "section_level" in flags:
        return "ask_sub_subtopic"
    if "question_number" not in flags:
        return "ask_question_number"
    return None


# -- fuzzy scoring ------------------------------------------------------------

def reference_allowed_edits(term: str, max_edit_distance: int) -> int:
    if len(term) <= 2:
        return 0
    if len(term) <= 5:
        return min(1, max_edit_distance)
    return max_edit_distance


def reference_term_distance(query_term: str, index_term: str, params):
    """Prefix-gated bounded distance, via the full-matrix oracle."""
    if query_term == index_term:
        return 0
    budget = reference_allowed_edits(query_term, params.max_edit_distance)
    if budget == 0:
        return None
    shortest = params.prefix_length + 2
    if len(query_term) < shortest or len(index_term) < shortest:
        return None
    if query_term[: params.prefix_length] != index_term[: params.prefix_length]:
        return None
    d = dp_levenshtein(query_term[params.prefix_length:],
                       index_term[params.prefix_length:])
    return d if d <= budget else None


def reference_search(entry_terms: dict, kinds: dict, weighted_terms: list,
                     params) -> list:
    """Flat-loop re-implementation of the weighted catalog search.

    entry_terms: entry_id -> {index term: boost}; kinds: entry_id -> kind.
    Returns (entry_id, score, coverage, matched) sorted like the index.
    """
    n_entries = len(entry_terms)
    df = {}
    for terms in entry_terms.values():
        for term in terms:
            df[term] = df.get(term, 0) + 1

    def idf(term):
        return 1.0 + math.log(n_entries / (1.0 + df.get(term, 0)))

    best_weight = {}
    for term, weight in weighted_terms:
        if weight > best_weight.get(term, 0.0):
            best_weight[term] = weight
    full = {t for t, w in best_weight.items() if w >= 1.0}
    required = math.ceil(params.min_should_match * len(full))

    results = []
    for entry_id, terms in entry_terms.items():
        matched = []
        score = 0.0
        matched_full = 0
        for query_term, weight in best_weight.items():
            candidates = []
            for index_term, boost in terms.items():
                d = reference_term_distance(query_term, index_term, params)
                if d is None:
                    continue
                contribution = (idf(index_term)
                                * (1.0 - d / (params.max_edit_distance + 1.0))
                                * boost * weight)
                candidates.append((contribution, index_term, d))
            if candidates:
                contribution, index_term, d = max(candidates, key=lambda c: c[0])
                score += contribution
                matched.append((query_term, index_term, d))
                if query_term in full:
                    matched_full += 1
        if matched and matched_full >= required and score >= params.relevance_threshold:
            coverage = len({m[1] for m in matched}) / len(terms)
            results.append((entry_id, score, coverage, tuple(matched)))
    results.sort(key=lambda r: (-r[1], -r[2], r[0]))
    return results


# -- classification metrics ---------------------------------------------------

def reference_macro_f1(gold: list, predicted: list) -> float:
    """Macro F1 straight from per-class counts; classes in gold or
    predictions count, a class in neither is out of scope."""
    classes = sorted(set(gold) | set(predicted))
    f1s = []
    for cls in classes:
        tp = sum(1 for g, p in zip(gold, predicted) if g == cls and p == cls)
        fp = sum(1 for g, p in zip(gold, predicted) if g != cls and p == cls)
        fn = sum(1 for g, p in zip(gold, predicted) if g == cls and p != cls)
        if 2 * tp + fp + fn == 0:
            f1s.append(0.0)
        else:
            f1s.append(2 * tp / (2 * tp + fp + fn))
    return sum(f1s) / len(f1s) if f1s else 0.0


def reference_dialogue_accuracy(dialogue_ids: list, gold: list,
                                predicted: list) -> float:
    """Mean over dialogues of the per-dialogue fraction of correct labels."""
    per_dialogue = {}
    for did, g, p in zip(dialogue_ids, gold, predicted):
        hits, total = per_dialogue.get(did, (0, 0))
        per_dialogue[did] = (hits + (1 if g == p else 0), total + 1)
    if not per_dialogue:
        return 0.0
    fractions = [hits / total for hits, total in per_dialogue.values()]
    return sum(fractions) / len(fractions)
