"""Descriptive statistics for judged corpora.

Counts passages, question/reference pairs, and candidates per dataset and
split, plus mean token lengths under the lexical tokenization. Mean
lengths are instance-weighted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..lexical.normalize import normalize_tokenize
from .types import JudgedInstance, passage_key


@dataclass
class CellStats:
    passages: int = 0
    question_reference_pairs: int = 0
    candidates: int = 0
    mean_passage_len: float = 0.0
    mean_question_len: float = 0.0
    mean_reference_len: float = 0.0
    mean_candidate_len: float = 0.0

    def to_dict(self) -> dict:
        return {
            "passages": self.passages,
            "question_reference_pairs": self.question_reference_pairs,
            "candidates": self.candidates,
            "mean_passage_len": round(self.mean_passage_len, 2),
            "mean_question_len": round(self.mean_question_len, 2),
            "mean_reference_len": round(self.mean_reference_len, 2),
            "mean_candidate_len": round(self.mean_candidate_len, 2),
        }


@dataclass
class CorpusStatistics:
    cells: dict[tuple[str, str], CellStats] = field(default_factory=dict)
    totals: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cells": {
                f"{dataset}/{split}": cell.to_dict()
                for (dataset, split), cell in sorted(self.cells.items())
            },
            "totals": dict(sorted(self.totals.items())),
        }

    def render_text(self) -> str:
        header = (
            f"{'dataset':20} {'split':6} {'pass.':>6} {'q/r':>6} {'cand.':>6} "
            f"{'p-len':>7} {'q-len':>6} {'r-len':>6} {'c-len':>6}"
        )
        lines = [header, "-" * len(header)]
        for (dataset, split), c in sorted(self.cells.items()):
            lines.append(
                f"{dataset:20} {split:6} {c.passages:>6} {c.question_reference_pairs:>6} "
                f"{c.candidates:>6} {c.mean_passage_len:>7.1f} {c.mean_question_len:>6.1f} "
                f"{c.mean_reference_len:>6.1f} {c.mean_candidate_len:>6.1f}"
            )
        lines.append("-" * len(header))
        for split, count in sorted(self.totals.items()):
            lines.append(f"total candidates [{split}]: {count}")
        return "\n".join(lines)


def score_histogram(instances: Iterable[JudgedInstance]) -> list[tuple[str, str, int, int]]:
    """Gold-score distribution as (dataset, split, score bucket, count) rows.

    Buckets are the gold score rounded to the nearest judgment point (1..5);
    emitted as CSV by the CLI in place of plots.
    """
    counts: dict[tuple[str, str, int], int] = {}
    for inst in instances:
        if inst.gold_score is None:
            continue
        bucket = min(5, max(1, round(inst.gold_score)))
        key = (inst.dataset_id, inst.split or "unassigned", bucket)
        counts[key] = counts.get(key, 0) + 1
    return [(d, s, b, n) for (d, s, b), n in sorted(counts.items())]


def corpus_statistics(instances: Iterable[JudgedInstance]) -> CorpusStatistics:
    buckets: dict[tuple[str, str], list[JudgedInstance]] = {}
    for inst in instances:
        split = inst.split or "unassigned"
        buckets.setdefault((inst.dataset_id, split), []).append(inst)

    report = CorpusStatistics()
    for key, group in buckets.items():
        passages = {passage_key(i.dataset_id, i.passage) for i in group}
        pairs = {
            (
                " ".join(normalize_tokenize(i.passage)),
                " ".join(normalize_tokenize(i.question)),
                " ".join(normalize_tokenize(i.reference)),
            )
            for i in group
        }
        n = len(group)
        cell = CellStats(
            passages=len(passages),
            question_reference_pairs=len(pairs),
            candidates=n,
            mean_passage_len=sum(len(normalize_tokenize(i.passage)) for i in group) / n,
            mean_question_len=sum(len(normalize_tokenize(i.question)) for i in group) / n,
            mean_reference_len=sum(len(normalize_tokenize(i.reference)) for i in group) / n,
            mean_candidate_len=sum(len(normalize_tokenize(i.candidate)) for i in group) / n,
        )
        report.cells[key] = cell
        split = key[1]
        report.totals[split] = report.totals.get(split, 0) + n
    return report
