# cython: boundscheck=False, wraparound=False
"""Compiled Levenshtein kernels.

Mirrors the pure-Python implementations in distance.py; distance.py picks
whichever is importable. Keep both in sync - the test suite compares them
against a full-matrix oracle and against each other.
"""


def levenshtein(str a, str b):
    """Edit distance with single-character insert/delete/substitute."""
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    # keep the shorter string in the inner dimension
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    cdef list prev = list(range(lb + 1))
    cdef list cur = [0] * (lb + 1)
    cdef Py_ssize_t i, j, cost, best, x
    for i in range(1, la + 1):
        cur[0] = i
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            best = prev[j - 1] + cost
            x = prev[j] + 1
            if x < best:
                best = x
            x = cur[j - 1] + 1
            if x < best:
                best = x
            cur[j] = best
        prev, cur = cur, prev
    return prev[lb]


def levenshtein_bounded(str a, str b, int bound):
    """Edit distance capped at `bound`: returns min(distance, bound + 1).

    Early-exits as soon as every cell of a row exceeds the bound, which is
    the common case when scanning an index for near matches.
    """
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if bound < 0:
        bound = 0
    if la == 0:
        return lb if lb <= bound else bound + 1
    if lb == 0:
        return la if la <= bound else bound + 1
    if la - lb > bound or lb - la > bound:
        return bound + 1
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    cdef list prev = list(range(lb + 1))
    cdef list cur = [0] * (lb + 1)
    cdef Py_ssize_t i, j, cost, best, x, row_min
    for i in range(1, la + 1):
        cur[0] = i
        row_min = i
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            best = prev[j - 1] + cost
            x = prev[j] + 1
            if x < best:
                best = x
            x = cur[j - 1] + 1
            if x < best:
                best = x
            cur[j] = best
            if best < row_min:
                row_min = best
        if row_min > bound:
            return bound + 1
        prev, cur = cur, prev
    if prev[lb] <= bound:
        return prev[lb]
    return bound + 1
