"""Levenshtein edit distance with an optional compiled backend.

The compiled extension (built from _lev.pyx) is used when available;
otherwise the pure-Python implementation below takes over. Setting the
environment variable TUTORDESK_PURE=1 forces the pure backend, which the
test suite uses to check that both backends agree.
"""

import os


def _py_levenshtein(a: str, b: str) -> int:
    """Edit distance with single-character insert/delete/substitute."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[lb]


def _py_levenshtein_bounded(a: str, b: str, bound: int) -> int:
    """Edit distance capped at `bound`: returns min(distance, bound + 1)."""
    if bound < 0:
        bound = 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb if lb <= bound else bound + 1
    if lb == 0:
        return la if la <= bound else bound + 1
    if abs(la - lb) > bound:
        return bound + 1
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        if min(cur) > bound:
            return bound + 1
        prev = cur
    return prev[lb] if prev[lb] <= bound else bound + 1


BACKEND = "python"
levenshtein = _py_levenshtein
levenshtein_bounded = _py_levenshtein_bounded

if not os.environ.get("TUTORDESK_PURE"):
    try:
        from tutordesk._lev import levenshtein, levenshtein_bounded  # noqa: F811

        BACKEND = "compiled"
    except ImportError:
        pass
