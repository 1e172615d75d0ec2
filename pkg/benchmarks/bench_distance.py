"""Benchmark the edit-distance backends against each other.

Times the compiled extension and the pure-Python fallback on the same
workloads: random word pairs of typical catalog-term length, and the
bounded variant that powers fuzzy index lookups. Run from the repo root:

    python3 benchmarks/bench_distance.py
    python3 benchmarks/bench_distance.py --pairs 20000 --rounds 5
"""

import argparse
import random
import string
import time

from tutordesk.distance import _py_levenshtein, _py_levenshtein_bounded

try:
    from tutordesk._lev import levenshtein as c_levenshtein
    from tutordesk._lev import levenshtein_bounded as c_levenshtein_bounded
except ImportError:
    c_levenshtein = None
    c_levenshtein_bounded = None


def make_pairs(n: int, seed: int, min_len: int, max_len: int) -> list:
    rng = random.Random(seed)
    alphabet = string.ascii_lowercase + "äöüß"
    def word():
        return "".join(
            rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len))
        )
    return [(word(), word()) for _ in range(n)]


def time_backend(fn, pairs: list, rounds: int, bound: int = None) -> float:
    """Best-of-rounds wall time in seconds for one full pass."""
    best = None
    for _ in range(rounds):
        started = time.perf_counter()
        if bound is None:
            for a, b in pairs:
                fn(a, b)
        else:
            for a, b in pairs:
                fn(a, b, bound)
        elapsed = time.perf_counter() - started
        best = elapsed if best is None else min(best, elapsed)
    return best


def report(label: str, pure: float, compiled, n: int) -> None:
    per_call = pure / n * 1e6
    print(f"{label}:")
    print(f"  pure python  {pure * 1000:8.1f} ms  ({per_call:.2f} us/pair)")
    if compiled is not None:
        per_call = compiled / n * 1e6
        print(f"  compiled     {compiled * 1000:8.1f} ms  ({per_call:.2f} us/pair)")
        print(f"  speedup      {pure / compiled:8.1f}x")
    else:
        print("  compiled     not built (pip install -e . rebuilds it)")


def main() -> None:
    parser = argparse.ArgumentParser(
        description="compare the edit-distance backends")
    parser.add_argument("--pairs", type=int, default=10000,
                        help="number of word pairs per workload")
    parser.add_argument("--rounds", type=int, default=3,
                        help="timing rounds; the best one counts")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--bound", type=int, default=2,
                        help="cutoff for the bounded variant")
    args = parser.parse_args()

    short = make_pairs(args.pairs, args.seed, 4, 12)
    long = make_pairs(args.pairs // 4, args.seed + 1, 20, 40)

    print(f"{args.pairs} short pairs (4-12 chars), "
          f"{len(long)} long pairs (20-40 chars), "
          f"best of {args.rounds} rounds\n")

    pure = time_backend(_py_levenshtein, short, args.rounds)
    compiled = (time_backend(c_levenshtein, short, args.rounds)
                if c_levenshtein else None)
    report("full distance, short words", pure, compiled, len(short))

    pure = time_backend(_py_levenshtein, long, args.rounds)
    compiled = (time_backend(c_levenshtein, long, args.rounds)
                if c_levenshtein else None)
    report("full distance, long words", pure, compiled, len(long))

    pure = time_backend(_py_levenshtein_bounded, short, args.rounds,
                        bound=args.bound)
    compiled = (time_backend(c_levenshtein_bounded, short, args.rounds,
                             bound=args.bound)
                if c_levenshtein_bounded else None)
    report(f"bounded at {args.bound}, short words", pure, compiled, len(short))


if __name__ == "__main__":
    main()
