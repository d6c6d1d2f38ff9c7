"""Pure-Python token kernels.

Reference implementations of the per-pair inner loops. The compiled twin
in ``_ckernels.pyx`` must agree exactly; ``kernels`` picks one at import.
Both operate on integer-encoded token sequences.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of the longest common subsequence of ``a`` and ``b``."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    cur = [0] * (m + 1)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                left = cur[j]
                up = prev[j + 1]
                cur[j + 1] = left if left >= up else up
        prev, cur = cur, prev
    return prev[m]


def clipped_overlap(cand: Sequence[int], ref: Sequence[int]) -> int:
    """Unigram matches with counts clipped to the reference frequency."""
    ref_counts = Counter(ref)
    cand_counts = Counter(cand)
    return sum(min(c, ref_counts[t]) for t, c in cand_counts.items() if t in ref_counts)
