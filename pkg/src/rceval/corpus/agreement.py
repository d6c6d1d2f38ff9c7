"""Inter-annotator agreement: Krippendorff's alpha with the interval
difference function.

Handles the varying-annotator setting: annotators differ between units and
only units with at least two scores contribute. The interval metric
delta(c, k) = (c - k)^2 suits the equally spaced 1..5 judgment scale.
"""

from __future__ import annotations

import math

from ..errors import PreconditionError
from .types import AnnotationTable


def krippendorff_alpha(table: AnnotationTable) -> float:
    """alpha = 1 - D_o / D_e over the pairable values of ``table``.

    Uses the computational form: within-unit and pooled sums of squared
    differences, which equals the coincidence-matrix definition. Returns
    1.0 when expected disagreement is zero (all values identical).
    """
    units = table.pairable_units()
    if not units:
        raise PreconditionError(
            "krippendorff_alpha: no unit has two or more scores"
        )

    # sum_{i != j} (v_i - v_j)^2 == 2 * (m * sum v^2 - (sum v)^2)
    def pair_sq_sum(values: list[int]) -> float:
        m = len(values)
        s1 = math.fsum(values)
        s2 = math.fsum(v * v for v in values)
        return 2.0 * (m * s2 - s1 * s1)

    n = sum(len(v) for v in units.values())
    observed = math.fsum(pair_sq_sum(v) / (len(v) - 1) for v in units.values()) / n

    pooled = [v for values in units.values() for v in values]
    expected = pair_sq_sum(pooled) / (n * (n - 1))

    if expected == 0.0:
        return 1.0
    return 1.0 - observed / expected
