from .normalize import normalize_tokenize
from .metrics import (
    MatchAlignment,
    MeteorParams,
    align,
    bleu1,
    meteor,
    rouge_l,
    score_batch,
    METRIC_FUNCTIONS,
)
from . import kernels

__all__ = [
    "normalize_tokenize",
    "MatchAlignment",
    "MeteorParams",
    "align",
    "bleu1",
    "meteor",
    "rouge_l",
    "score_batch",
    "METRIC_FUNCTIONS",
    "kernels",
]
