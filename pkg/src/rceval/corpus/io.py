"""Corpus file I/O.

Judged corpora and minimal pairs share one nesting: a top-level JSON object
mapping dataset_id -> instance_id -> record. Multiple-choice pre-training
files are flat arrays. All readers validate records against the type
invariants; in non-strict mode invalid records are dropped and reported,
in strict mode the first problem aborts the load.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..errors import ParseError, ValidationError
from .types import (
    JudgedInstance,
    MCExample,
    MinimalPair,
    Phenomenon,
    parse_generation_source,
)

log = logging.getLogger(__name__)

KINDS = ("judged", "minimal_pairs", "mc")


@dataclass(frozen=True)
class RecordProblem:
    dataset_id: str
    record_id: str
    message: str

    def __str__(self) -> str:
        return f"{self.dataset_id}/{self.record_id}: {self.message}"


def _read_json(path) -> object:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: file does not exist")
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def _require(leaf: dict, keys: Iterable[str]) -> list[str]:
    return [f"missing key {k!r}" for k in keys if k not in leaf]


def read_judged(
    path, strict: bool = False, require_gold: bool = True
) -> tuple[list[JudgedInstance], list[RecordProblem]]:
    """Load a judged corpus file.

    Returns the valid instances plus one problem entry per rejected record.
    ``require_gold=False`` admits prediction-input records that carry no
    score or annotations.
    """
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a top-level object keyed by dataset id")
    instances: list[JudgedInstance] = []
    problems: list[RecordProblem] = []

    def reject(dataset_id: str, record_id: str, message: str) -> None:
        problem = RecordProblem(dataset_id, record_id, message)
        if strict:
            raise ValidationError(str(problem))
        problems.append(problem)

    for dataset_id, records in data.items():
        if not isinstance(records, dict):
            reject(dataset_id, "*", "dataset entry is not an object of instances")
            continue
        for instance_id, leaf in records.items():
            if not isinstance(leaf, dict):
                reject(dataset_id, instance_id, "record is not an object")
                continue
            missing = _require(leaf, ("context", "question", "reference", "candidate"))
            if missing:
                reject(dataset_id, instance_id, "; ".join(missing))
                continue
            annotations = leaf.get("annotations")
            if annotations is None:
                annotations = ()
            elif isinstance(annotations, list):
                annotations = tuple(annotations)
            else:
                reject(dataset_id, instance_id, "annotations: not an array")
                continue
            score = leaf.get("score")
            if score is None and annotations:
                score = sum(annotations) / len(annotations) if all(
                    isinstance(a, int) and not isinstance(a, bool) for a in annotations
                ) else None
            metadata = leaf.get("metadata") or {}
            inst = JudgedInstance(
                dataset_id=dataset_id,
                instance_id=instance_id,
                passage=leaf["context"],
                question=leaf["question"],
                reference=leaf["reference"],
                candidate=leaf["candidate"],
                generation_source=parse_generation_source(metadata.get("source")),
                annotations=annotations,
                gold_score=float(score) if score is not None else None,
                split=leaf.get("split"),
            )
            record_problems = inst.validation_problems(require_gold=require_gold)
            if record_problems:
                reject(dataset_id, instance_id, "; ".join(record_problems))
                continue
            instances.append(inst)
    return instances, problems


def write_judged(instances: Iterable[JudgedInstance], path) -> None:
    """Write the canonical judged-corpus file (fixed leaf key order)."""
    data: dict[str, dict[str, dict]] = {}
    for inst in instances:
        leaf: dict = {
            "context": inst.passage,
            "question": inst.question,
            "reference": inst.reference,
            "candidate": inst.candidate,
        }
        if inst.gold_score is not None:
            leaf["score"] = inst.gold_score
        if inst.annotations:
            leaf["annotations"] = list(inst.annotations)
        leaf["metadata"] = {"source": inst.generation_source.value}
        if inst.split is not None:
            leaf["split"] = inst.split
        data.setdefault(inst.dataset_id, {})[inst.instance_id] = leaf
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=1)
        f.write("\n")


def read_minimal_pairs(path, strict: bool = False) -> tuple[list[MinimalPair], list[RecordProblem]]:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a top-level object keyed by dataset id")
    pairs: list[MinimalPair] = []
    problems: list[RecordProblem] = []

    def reject(dataset_id: str, record_id: str, message: str) -> None:
        problem = RecordProblem(dataset_id, record_id, message)
        if strict:
            raise ValidationError(str(problem))
        problems.append(problem)

    valid_phenomena = {p.value for p in Phenomenon}
    for dataset_id, records in data.items():
        if not isinstance(records, dict):
            reject(dataset_id, "*", "dataset entry is not an object of pairs")
            continue
        for pair_id, leaf in records.items():
            if not isinstance(leaf, dict):
                reject(dataset_id, pair_id, "record is not an object")
                continue
            missing = _require(
                leaf,
                ("context", "question", "reference", "candidate1", "candidate2",
                 "score1", "score2", "phenomenon"),
            )
            if missing:
                reject(dataset_id, pair_id, "; ".join(missing))
                continue
            if leaf["phenomenon"] not in valid_phenomena:
                reject(
                    dataset_id,
                    pair_id,
                    f"phenomenon: {leaf['phenomenon']!r} not one of {sorted(valid_phenomena)}",
                )
                continue
            pair = MinimalPair(
                dataset_id=dataset_id,
                pair_id=pair_id,
                passage=leaf["context"],
                question=leaf["question"],
                reference=leaf["reference"],
                candidate_1=leaf["candidate1"],
                candidate_2=leaf["candidate2"],
                score_1=float(leaf["score1"]),
                score_2=float(leaf["score2"]),
                phenomenon=Phenomenon(leaf["phenomenon"]),
            )
            record_problems = pair.validation_problems()
            if record_problems:
                reject(dataset_id, pair_id, "; ".join(record_problems))
                continue
            pairs.append(pair)
    return pairs, problems


def write_minimal_pairs(pairs: Iterable[MinimalPair], path) -> None:
    data: dict[str, dict[str, dict]] = {}
    for pair in pairs:
        data.setdefault(pair.dataset_id, {})[pair.pair_id] = {
            "context": pair.passage,
            "question": pair.question,
            "reference": pair.reference,
            "candidate1": pair.candidate_1,
            "candidate2": pair.candidate_2,
            "score1": pair.score_1,
            "score2": pair.score_2,
            "phenomenon": pair.phenomenon.value,
        }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=1)
        f.write("\n")


def read_mc(path, strict: bool = False) -> tuple[list[MCExample], list[RecordProblem]]:
    data = _read_json(path)
    if not isinstance(data, list):
        raise ParseError(f"{path}: expected a top-level array of multiple-choice records")
    examples: list[MCExample] = []
    problems: list[RecordProblem] = []
    for pos, leaf in enumerate(data):
        record_id = str(pos)

        def reject(message: str, record_id=record_id) -> None:
            problem = RecordProblem("mc", record_id, message)
            if strict:
                raise ValidationError(str(problem))
            problems.append(problem)

        if not isinstance(leaf, dict):
            reject("record is not an object")
            continue
        missing = _require(leaf, ("context", "question", "options", "correct"))
        if missing:
            reject("; ".join(missing))
            continue
        example = MCExample(
            passage=leaf["context"],
            question=leaf["question"],
            options=tuple(leaf["options"]),
            correct_indices=frozenset(leaf["correct"]),
        )
        record_problems = example.validation_problems()
        if record_problems:
            reject("; ".join(record_problems))
            continue
        examples.append(example)
    return examples, problems


def write_mc(examples: Iterable[MCExample], path) -> None:
    data = [
        {
            "context": ex.passage,
            "question": ex.question,
            "options": list(ex.options),
            "correct": sorted(ex.correct_indices),
        }
        for ex in examples
    ]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=1)
        f.write("\n")


_READERS = {
    "judged": read_judged,
    "minimal_pairs": read_minimal_pairs,
    "mc": read_mc,
}


def load_corpus(path, kind: str, strict: bool = False, **kwargs) -> list:
    """Load a corpus file of the given kind, dropping (and logging) invalid
    records unless ``strict``."""
    if kind not in _READERS:
        raise ValueError(f"unknown corpus kind {kind!r}; valid: {KINDS}")
    records, problems = _READERS[kind](path, strict=strict, **kwargs)
    for problem in problems:
        log.warning("dropped record %s", problem)
    return records
