"""Sentence-level lexical baselines: BLEU-1, ROUGE-L, METEOR.

All three operate on normalized token sequences (see ``normalize_tokenize``)
and return scores in [0, 1]. They reimplement the original exact/stem
formulations rather than wrapping an external scorer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernels
from .align import MatchAlignment, align
from .normalize import normalize_tokenize


def bleu1(reference: Sequence[str], candidate: Sequence[str]) -> float:
    """Clipped unigram precision times the brevity penalty.

    No smoothing: a candidate sharing no unigram with the reference scores 0.
    """
    if not candidate:
        return 0.0
    ref_ids, cand_ids = kernels.encode_pair(reference, candidate)
    matches = kernels.clipped_overlap(cand_ids, ref_ids)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    if len(candidate) >= len(reference):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(reference) / len(candidate))
    return bp * precision


def rouge_l(reference: Sequence[str], candidate: Sequence[str], beta: float = 1.2) -> float:
    """LCS-based F-measure; ``beta`` weights recall over precision."""
    if not reference or not candidate:
        return 0.0
    ref_ids, cand_ids = kernels.encode_pair(reference, candidate)
    lcs = kernels.lcs_length(ref_ids, cand_ids)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    b2 = beta * beta
    return (1.0 + b2) * precision * recall / (recall + b2 * precision)


@dataclass(frozen=True)
class MeteorParams:
    fmean_weight: float = 9.0
    penalty_weight: float = 0.5
    penalty_power: float = 3.0
    stemming: bool = True


def meteor(
    reference: Sequence[str],
    candidate: Sequence[str],
    params: MeteorParams = MeteorParams(),
) -> float:
    """Harmonic-mean unigram score with a fragmentation penalty.

    Alignment is one-to-one: exact surface matches first, then stem matches
    when ``params.stemming`` is set.
    """
    if not reference or not candidate:
        return 0.0
    alignment = align(reference, candidate, stemming=params.stemming)
    m = alignment.match_count
    if m == 0:
        return 0.0
    precision = m / len(candidate)
    recall = m / len(reference)
    w = params.fmean_weight
    fmean = (w + 1.0) * precision * recall / (recall + w * precision)
    penalty = params.penalty_weight * (alignment.chunk_count / m) ** params.penalty_power
    return fmean * (1.0 - penalty)


METRIC_FUNCTIONS = {
    "bleu1": bleu1,
    "rouge_l": rouge_l,
    "meteor": meteor,
}


def score_batch(metric: str, instances: Iterable) -> list[tuple[str, float]]:
    """Score judged instances with one of the lexical metrics.

    Normalizes reference and candidate, applies the metric, and preserves
    input order. ``instances`` must expose ``instance_id``, ``reference``,
    and ``candidate`` attributes.
    """
    try:
        fn = METRIC_FUNCTIONS[metric]
    except KeyError:
        raise KeyError(
            f"unknown lexical metric {metric!r}; valid: {sorted(METRIC_FUNCTIONS)}"
        ) from None
    out = []
    for inst in instances:
        ref = normalize_tokenize(inst.reference)
        cand = normalize_tokenize(inst.candidate)
        out.append((inst.instance_id, fn(ref, cand)))
    return out
