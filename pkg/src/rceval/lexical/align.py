"""One-to-one unigram alignment for METEOR.

Pairs candidate tokens with reference tokens, exact surface matches first,
then (optionally) stem matches. Among maximum-cardinality alignments the
search prefers, in order: more exact-surface pairs, fewer chunks, and the
lexicographically smallest reference-index sequence.

Answer strings in this domain are short, so an exhaustive branch-and-bound
is affordable; a node budget guards against pathological inputs, falling
back to a left-to-right greedy pass that extends the current chunk when it
can.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .porter import stem

_NODE_BUDGET = 50_000


@dataclass(frozen=True)
class MatchAlignment:
    """Matched (candidate index, reference index) pairs, candidate-ordered.

    ``chunk_count`` is the number of maximal runs where both indices
    increase by exactly 1 between consecutive pairs.
    """

    pairs: tuple[tuple[int, int], ...]
    chunk_count: int

    @property
    def match_count(self) -> int:
        return len(self.pairs)


def count_chunks(pairs: Sequence[tuple[int, int]]) -> int:
    chunks = 0
    prev = None
    for ci, ri in pairs:
        if prev is None or ci != prev[0] + 1 or ri != prev[1] + 1:
            chunks += 1
        prev = (ci, ri)
    return chunks


def _edges(ref: Sequence[str], cand: Sequence[str], stemming: bool):
    """Per candidate index: eligible reference indices and exactness flags."""
    ref_stems = [stem(t) for t in ref] if stemming else None
    cand_stems = [stem(t) for t in cand] if stemming else None
    adjacency: list[list[int]] = []
    exact: list[list[bool]] = []
    for i, ct in enumerate(cand):
        js, flags = [], []
        for j, rt in enumerate(ref):
            if ct == rt:
                js.append(j)
                flags.append(True)
            elif stemming and cand_stems[i] == ref_stems[j]:
                js.append(j)
                flags.append(False)
        adjacency.append(js)
        exact.append(flags)
    return adjacency, exact


def _max_matching_size(adjacency: list[list[int]], n_ref: int) -> int:
    """Maximum bipartite matching size via augmenting paths."""
    match_ref = [-1] * n_ref

    def try_augment(i: int, seen: list[bool]) -> bool:
        for j in adjacency[i]:
            if not seen[j]:
                seen[j] = True
                if match_ref[j] == -1 or try_augment(match_ref[j], seen):
                    match_ref[j] = i
                    return True
        return False

    size = 0
    for i in range(len(adjacency)):
        if adjacency[i] and try_augment(i, [False] * n_ref):
            size += 1
    return size


def _greedy(adjacency, exact, n_cand) -> list[tuple[int, int]]:
    """Fallback: left-to-right, exact before stem, extend chunk when possible."""
    used: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for want_exact in (True, False):
        taken = {ci for ci, _ in pairs}
        for i in range(n_cand):
            if i in taken:
                continue
            options = [
                j
                for j, is_exact in zip(adjacency[i], exact[i])
                if is_exact == want_exact and j not in used
            ]
            if not options:
                continue
            prev = max((p for p in pairs if p[0] < i), default=None)
            extend = None
            if prev is not None and prev[0] == i - 1 and prev[1] + 1 in options:
                extend = prev[1] + 1
            j = extend if extend is not None else options[0]
            used.add(j)
            pairs.append((i, j))
            pairs.sort()
            taken.add(i)
    return sorted(pairs)


def align(ref: Sequence[str], cand: Sequence[str], stemming: bool = True) -> MatchAlignment:
    """Align ``cand`` against ``ref``; empty alignment when nothing matches."""
    adjacency, exact = _edges(ref, cand, stemming)
    target = _max_matching_size(adjacency, len(ref))
    if target == 0:
        return MatchAlignment(pairs=(), chunk_count=0)

    n = len(cand)
    best: list | None = None  # [-(exact count), chunks, ref index seq, pairs]
    nodes = 0

    def dfs(i, used_mask, pairs, exact_count, chunks, last):
        nonlocal best, nodes
        nodes += 1
        if nodes > _NODE_BUDGET:
            raise _BudgetExceeded
        matched = len(pairs)
        if matched + (n - i) < target:
            return
        if i == n:
            if matched == target:
                key = [-exact_count, chunks, [j for _, j in pairs], pairs]
                if best is None or key < best:
                    best = key
            return
        # candidate orderings: chunk-extending ref first, exact before stem
        options = sorted(
            zip(adjacency[i], exact[i]),
            key=lambda jf: (
                not (last is not None and last[0] == i - 1 and jf[0] == last[1] + 1),
                not jf[1],
                jf[0],
            ),
        )
        for j, is_exact in options:
            if used_mask & (1 << j):
                continue
            new_chunks = chunks + (
                0 if last is not None and last == (i - 1, j - 1) else 1
            )
            dfs(
                i + 1,
                used_mask | (1 << j),
                pairs + [(i, j)],
                exact_count + (1 if is_exact else 0),
                new_chunks,
                (i, j),
            )
        dfs(i + 1, used_mask, pairs, exact_count, chunks, last)

    try:
        dfs(0, 0, [], 0, 0, None)
        pairs = best[3]
    except _BudgetExceeded:
        pairs = _greedy(adjacency, exact, n)
    return MatchAlignment(pairs=tuple(pairs), chunk_count=count_chunks(pairs))


class _BudgetExceeded(Exception):
    pass
