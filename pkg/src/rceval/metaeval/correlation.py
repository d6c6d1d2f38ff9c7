"""Sample Pearson correlation.

Two-pass mean-centered computation with compensated summation, accurate
enough for the affine-invariance property to hold to 1e-12. Zero variance
on either side raises rather than silently returning 0.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import PreconditionError, UndefinedCorrelationError


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise PreconditionError(
            f"pearson: length mismatch ({len(xs)} vs {len(ys)})"
        )
    n = len(xs)
    if n < 2:
        raise PreconditionError(f"pearson: need at least 2 points, got {n}")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        side = "xs" if var_x == 0.0 else "ys"
        raise UndefinedCorrelationError(
            f"pearson undefined: zero variance in {side}"
        )
    cov = math.fsum(a * b for a, b in zip(dx, dy))
    r = cov / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))
