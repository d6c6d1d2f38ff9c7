"""Passage-disjoint split assignment.

Candidates sharing a passage must land in the same split, so assignment
operates on passages, greedily filling the split with the largest
remaining deficit (by instance count). Deterministic for a fixed seed.
"""

from __future__ import annotations

import random
from typing import Iterable

from ..errors import PreconditionError
from .types import SPLITS, JudgedInstance, passage_key


def split_by_passage(
    instances: Iterable[JudgedInstance],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> dict[tuple[str, str], str]:
    """Assign each passage to train/dev/test, approximating ``ratios`` by
    instance count. Returns passage key -> split name."""
    instances = list(instances)
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise PreconditionError(
            f"ratios must be three positive reals summing to 1, got {ratios}"
        )
    groups: dict[tuple[str, str], int] = {}
    for inst in instances:
        key = passage_key(inst.dataset_id, inst.passage)
        groups[key] = groups.get(key, 0) + 1
    if not groups:
        raise PreconditionError("no passages to split")

    keys = sorted(groups)
    random.Random(seed).shuffle(keys)
    total = len(instances)
    targets = [r * total for r in ratios]
    filled = [0.0, 0.0, 0.0]
    assignment: dict[tuple[str, str], str] = {}
    for key in keys:
        deficits = [targets[i] - filled[i] for i in range(3)]
        choice = max(range(3), key=lambda i: (deficits[i], -i))
        assignment[key] = SPLITS[choice]
        filled[choice] += groups[key]
    return assignment


def apply_split(
    instances: Iterable[JudgedInstance], assignment: dict[tuple[str, str], str]
) -> list[JudgedInstance]:
    """Stamp each instance with its assigned split."""
    out = []
    for inst in instances:
        split = assignment[passage_key(inst.dataset_id, inst.passage)]
        out.append(inst.with_split(split))
    return out
