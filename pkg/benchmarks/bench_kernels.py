"""Benchmark the compiled token kernels against the pure-Python fallback.

The kernels are the per-pair inner loops of batch scoring: LCS length
(ROUGE-L) and clipped unigram overlap (BLEU-1). Run:

    python3 benchmarks/bench_kernels.py --pairs 20000
"""

from __future__ import annotations

import argparse
import random
import statistics
import time
from array import array

from rceval.lexical import _pykernels
from rceval.lexical import kernels

try:
    from rceval.lexical import _ckernels
except ImportError:
    _ckernels = None


def make_pairs(n: int, min_len: int, max_len: int, vocab: int, seed: int):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        ref = [rng.randrange(vocab) for _ in range(rng.randint(min_len, max_len))]
        cand = [rng.randrange(vocab) for _ in range(rng.randint(min_len, max_len))]
        pairs.append((ref, cand))
    return pairs


def bench(fn, pairs, repeats: int = 3) -> tuple[float, int]:
    times = []
    sink = 0
    for _ in range(repeats):
        start = time.perf_counter()
        for ref, cand in pairs:
            sink += fn(ref, cand)
        times.append(time.perf_counter() - start)
    return min(times), sink


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=20000)
    parser.add_argument("--min-len", type=int, default=3)
    parser.add_argument("--max-len", type=int, default=25)
    parser.add_argument("--vocab", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.min_len, args.max_len, args.vocab, args.seed)
    as_arrays = [(array("i", r), array("i", c)) for r, c in pairs]
    mean_len = statistics.mean(len(r) + len(c) for r, c in pairs) / 2

    print(f"pairs: {args.pairs}, mean tokens/side: {mean_len:.1f}")
    print(f"active backend: {kernels.backend_name()}")
    print()
    print(f"{'kernel':<18} {'backend':<9} {'time':>9} {'pairs/s':>12} {'speedup':>8}")
    print("-" * 60)

    rows = [
        ("lcs_length", _pykernels.lcs_length, pairs,
         _ckernels.lcs_length if _ckernels else None, as_arrays),
        ("clipped_overlap", _pykernels.clipped_overlap, pairs,
         _ckernels.clipped_overlap if _ckernels else None, as_arrays),
    ]
    for name, pure_fn, pure_data, compiled_fn, compiled_data in rows:
        pure_time, pure_sink = bench(pure_fn, pure_data)
        print(f"{name:<18} {'pure':<9} {pure_time:>8.3f}s {args.pairs / pure_time:>12,.0f} {'1.0x':>8}")
        if compiled_fn is None:
            print(f"{name:<18} {'compiled':<9} {'unavailable':>9}")
            continue
        compiled_time, compiled_sink = bench(compiled_fn, compiled_data)
        if pure_sink != compiled_sink:
            raise SystemExit(f"{name}: backends disagree ({pure_sink} vs {compiled_sink})")
        print(
            f"{name:<18} {'compiled':<9} {compiled_time:>8.3f}s "
            f"{args.pairs / compiled_time:>12,.0f} {pure_time / compiled_time:>7.1f}x"
        )


if __name__ == "__main__":
    main()
