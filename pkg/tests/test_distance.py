"""Edit distance: oracle agreement, bounded variant, backend parity."""

import random
import string
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tutordesk import distance
from tutordesk.distance import levenshtein, levenshtein_bounded

from oracles import dp_levenshtein

ALPHABET = string.ascii_lowercase + "äöüß"


def random_word(rng, max_len=12):
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randrange(max_len + 1)))


def test_known_values():
    assert levenshtein("", "") == 0
    assert levenshtein("abc", "abc") == 0
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("flaw", "lawn") == 2
    assert levenshtein("algebra", "algebr") == 1
    assert levenshtein("", "abc") == 3
    assert levenshtein("übung", "ubung") == 1


def test_matches_dp_oracle_on_10k_random_pairs():
    rng = random.Random(1234)
    for _ in range(10_000):
        a, b = random_word(rng), random_word(rng)
        assert levenshtein(a, b) == dp_levenshtein(a, b), (a, b)


def test_bounded_agrees_with_unbounded_within_bound():
    rng = random.Random(99)
    for _ in range(2_000):
        a, b = random_word(rng), random_word(rng)
        bound = rng.randrange(0, 5)
        full = dp_levenshtein(a, b)
        capped = levenshtein_bounded(a, b, bound)
        if full <= bound:
            assert capped == full, (a, b, bound)
        else:
            assert capped == bound + 1, (a, b, bound)


def test_bounded_negative_bound_clamps_to_zero():
    assert levenshtein_bounded("abc", "abc", -3) == 0
    assert levenshtein_bounded("abc", "abd", -3) == 1  # bound 0 -> 0 + 1


@given(st.text(max_size=20), st.text(max_size=20))
@settings(max_examples=300, deadline=None)
def test_symmetry(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)


@given(st.text(max_size=20))
@settings(max_examples=200, deadline=None)
def test_identity(a):
    assert levenshtein(a, a) == 0


@given(st.text(max_size=12), st.text(max_size=12), st.text(max_size=12))
@settings(max_examples=200, deadline=None)
def test_triangle_inequality(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@given(st.text(min_size=1, max_size=20), st.integers(min_value=0, max_value=19))
@settings(max_examples=200, deadline=None)
def test_single_deletion_costs_one(a, i):
    if i < len(a):
        b = a[:i] + a[i + 1:]
        assert levenshtein(a, b) <= 1
        if a != b:
            assert levenshtein(a, b) == 1


def test_compiled_backend_is_active():
    # the package ships the compiled kernel; a silent fallback to the
    # pure backend would invalidate the benchmark and the parity test
    assert distance.BACKEND == "compiled"


def test_pure_backend_forced_by_environment_matches_compiled():
    rng = random.Random(7)
    pairs = [(random_word(rng), random_word(rng)) for _ in range(300)]
    pairs += [("kitten", "sitting"), ("", ""), ("übungen", "übung")]
    code = (
        "import json,sys\n"
        "from tutordesk.distance import levenshtein, levenshtein_bounded, BACKEND\n"
        "pairs = json.load(sys.stdin)\n"
        "out = {'backend': BACKEND,\n"
        "       'd': [levenshtein(a, b) for a, b in pairs],\n"
        "       'b': [levenshtein_bounded(a, b, 2) for a, b in pairs]}\n"
        "json.dump(out, sys.stdout)\n"
    )
    import json
    import os

    env = dict(os.environ, TUTORDESK_PURE="1")
    proc = subprocess.run(
        [sys.executable, "-c", code], input=json.dumps(pairs),
        capture_output=True, text=True, env=env, check=True,
    )
    result = json.loads(proc.stdout)
    assert result["backend"] == "python"
    assert result["d"] == [levenshtein(a, b) for a, b in pairs]
    assert result["b"] == [levenshtein_bounded(a, b, 2) for a, b in pairs]
