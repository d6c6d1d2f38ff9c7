"""Uniform metric wrapper for meta-evaluation.

A ``Metric`` maps (passage, question, reference, candidate) to one real
score. Implementations over imported score files ignore the texts and look
up by instance id instead; minimal-pair evaluation passes the synthetic
ids ``<pair_id>::c1`` / ``<pair_id>::c2`` so file-backed metrics can score
pairs too.
"""

from __future__ import annotations

import json
from typing import Callable

from ..errors import MissingScoreError, ParseError
from ..lexical import METRIC_FUNCTIONS, normalize_tokenize
from ..lexical.metrics import MeteorParams, meteor


class Metric:
    """Deterministic scoring function with a name and a score range."""

    def __init__(
        self,
        name: str,
        fn: Callable,
        score_range: tuple[float, float],
        kind: str = "other",
    ):
        self.name = name
        self._fn = fn
        self.score_range = score_range
        self.kind = kind

    def score(
        self,
        passage: str,
        question: str,
        reference: str,
        candidate: str,
        instance_id: str | None = None,
    ) -> float:
        return self._fn(passage, question, reference, candidate, instance_id)


def lexical_metric(name: str, **kwargs) -> Metric:
    base = METRIC_FUNCTIONS[name]
    if name == "meteor" and kwargs:
        params = MeteorParams(**kwargs)

        def fn(p, q, ref, cand, _id=None, params=params):
            return meteor(normalize_tokenize(ref), normalize_tokenize(cand), params)
    else:
        def fn(p, q, ref, cand, _id=None, base=base):
            return base(normalize_tokenize(ref), normalize_tokenize(cand))

    return Metric(name, fn, (0.0, 1.0), kind="lexical")


def learned_metric(model, name: str = "learned", use_raw: bool = True) -> Metric:
    """Wrap a trained judgment model; raw scores by default so correlation
    is computed on the unclamped regression output."""
    from ..learned.model import predict_score

    def fn(p, q, ref, cand, _id=None):
        raw, reported = predict_score(model, p, q, ref, cand)
        return raw if use_raw else reported

    metric = Metric(name, fn, (1.0, 5.0), kind="learned")
    metric.model = model
    return metric


def constant_metric(value: float, name: str = "constant") -> Metric:
    return Metric(name, lambda *a, **k: value, (value, value))


def gold_oracle_metric(instances, pairs=(), name: str = "gold_oracle") -> Metric:
    """Looks up the human judgment itself; sanity anchor for the protocol."""
    table: dict[str, float] = {}
    for inst in instances:
        table[inst.instance_id] = inst.gold_score
    for pair in pairs:
        table[f"{pair.pair_id}::c1"] = pair.score_1
        table[f"{pair.pair_id}::c2"] = pair.score_2

    def fn(p, q, ref, cand, instance_id=None):
        if instance_id is None or instance_id not in table:
            raise MissingScoreError(f"gold oracle has no score for {instance_id!r}")
        return table[instance_id]

    return Metric(name, fn, (1.0, 5.0))


def transformed_metric(base: Metric, transform, name: str | None = None) -> Metric:
    def fn(p, q, ref, cand, instance_id=None):
        return transform(base.score(p, q, ref, cand, instance_id))

    return Metric(name or f"{base.name}+t", fn, (float("-inf"), float("inf")))


def scores_from_mapping(scores: dict[str, float], name: str) -> Metric:
    def fn(p, q, ref, cand, instance_id=None):
        if instance_id is None or instance_id not in scores:
            raise MissingScoreError(
                f"score file '{name}' has no entry for instance {instance_id!r}"
            )
        return float(scores[instance_id])

    lo = min(scores.values(), default=0.0)
    hi = max(scores.values(), default=0.0)
    metric = Metric(name, fn, (float(lo), float(hi)), kind="imported")
    metric.mapping = scores
    return metric


def _reject_duplicate_keys(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise ParseError(f"duplicate instance id {key!r} in score file")
        seen.add(key)
        out[key] = value
    return out


def import_external_scores(path, name: str | None = None) -> Metric:
    """Load an instance_id -> number score file as a Metric."""
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f, object_pairs_hook=_reject_duplicate_keys)
    except FileNotFoundError:
        raise ParseError(f"{path}: file does not exist") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected an object mapping instance ids to numbers")
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{path}: score for {key!r} is not a number")
    return scores_from_mapping(
        {k: float(v) for k, v in data.items()}, name or str(path)
    )


def write_score_file(scores: dict[str, float], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(dict(scores), f, indent=1, ensure_ascii=False, sort_keys=True)
        f.write("\n")
