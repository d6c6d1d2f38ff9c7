"""Meta-evaluation reports.

Correlation against human judgments per (dataset, split), minimal-pair
preference with the half-point tie rule, per-generation-source breakdowns,
and score-divergence listings. Cells where Pearson is undefined (fewer
than two points or zero variance) are surfaced explicitly and excluded
from averages, never imputed as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import PreconditionError, UndefinedCorrelationError
from .correlation import pearson
from .metrics import Metric

SPLIT_ORDER = ("train", "dev", "test")


@dataclass
class CorrelationCell:
    r: float | None
    n: int
    undefined_reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.r is not None

    def to_dict(self) -> dict:
        out = {"r": self.r, "n": self.n}
        if self.undefined_reason:
            out["undefined_reason"] = self.undefined_reason
        return out


@dataclass
class CorrelationReport:
    metric_name: str
    cells: dict[tuple[str, str], CorrelationCell] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def averages(self) -> dict[str, float | None]:
        """Unweighted mean of defined per-dataset cells, per split."""
        out: dict[str, float | None] = {}
        for split in sorted({split for _, split in self.cells}):
            values = [
                cell.r
                for (_, s), cell in self.cells.items()
                if s == split and cell.defined
            ]
            out[split] = sum(values) / len(values) if values else None
        return out

    def undefined_cells(self) -> list[tuple[str, str, str]]:
        return [
            (ds, split, cell.undefined_reason or "undefined")
            for (ds, split), cell in sorted(self.cells.items())
            if not cell.defined
        ]

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_name,
            "cells": {
                f"{ds}/{split}": cell.to_dict()
                for (ds, split), cell in sorted(self.cells.items())
            },
            "averages": self.averages(),
            "undefined": [
                {"dataset": ds, "split": split, "reason": reason}
                for ds, split, reason in self.undefined_cells()
            ],
            "metadata": self.metadata,
        }

    def render_text(self) -> str:
        datasets = sorted({ds for ds, _ in self.cells})
        splits = [s for s in SPLIT_ORDER if any(k[1] == s for k in self.cells)]
        splits += sorted({s for _, s in self.cells} - set(splits))
        width = max([len(d) for d in datasets] + [8])
        header = f"{'dataset':{width}}" + "".join(f" {s:>8}" for s in splits)
        lines = [f"metric: {self.metric_name}", header, "-" * len(header)]
        for ds in datasets:
            row = f"{ds:{width}}"
            for split in splits:
                cell = self.cells.get((ds, split))
                if cell is None:
                    row += f" {'-':>8}"
                elif cell.defined:
                    row += f" {cell.r:8.3f}"
                else:
                    row += f" {'undef':>8}"
            lines.append(row)
        lines.append("-" * len(header))
        avg = self.averages()
        row = f"{'Avg. r':{width}}"
        for split in splits:
            value = avg.get(split)
            row += f" {value:8.3f}" if value is not None else f" {'undef':>8}"
        lines.append(row)
        return "\n".join(lines)


def evaluate_correlation(
    metric: Metric,
    instances,
    splits: Iterable[str] = ("dev", "test"),
    group_by_source: bool = False,
) -> CorrelationReport:
    """Pearson r between metric scores and gold scores per (dataset, split)
    cell (or (dataset, source) when ``group_by_source``)."""
    splits = set(splits)
    selected = [i for i in instances if i.split in splits]
    for inst in selected:
        if inst.gold_score is None:
            raise PreconditionError(
                f"evaluate_correlation: instance {inst.dataset_id}/{inst.instance_id} "
                "has no gold score"
            )
    groups: dict[tuple[str, str], list] = {}
    for inst in selected:
        key = (
            inst.dataset_id,
            inst.generation_source.value if group_by_source else inst.split,
        )
        groups.setdefault(key, []).append(inst)

    report = CorrelationReport(metric_name=metric.name)
    report.metadata["splits"] = sorted(splits)
    report.metadata["average"] = "unweighted mean over datasets"
    for key, group in groups.items():
        scores = [
            metric.score(i.passage, i.question, i.reference, i.candidate, i.instance_id)
            for i in group
        ]
        golds = [i.gold_score for i in group]
        if len(group) < 2:
            report.cells[key] = CorrelationCell(None, len(group), "fewer than 2 instances")
            continue
        try:
            r = pearson(scores, golds)
            report.cells[key] = CorrelationCell(r, len(group))
        except UndefinedCorrelationError as e:
            report.cells[key] = CorrelationCell(None, len(group), str(e))
    return report


def per_source_correlation(
    metric: Metric, instances, splits: Iterable[str] = ("dev",)
) -> CorrelationReport:
    """Correlation broken down by the system that generated each candidate."""
    return evaluate_correlation(metric, instances, splits=splits, group_by_source=True)


@dataclass
class PreferenceCell:
    wins: int = 0
    ties: int = 0
    losses: int = 0

    @property
    def pairs(self) -> int:
        return self.wins + self.ties + self.losses

    @property
    def accuracy(self) -> float:
        return (self.wins + 0.5 * self.ties) / self.pairs

    def to_dict(self) -> dict:
        return {
            "wins": self.wins,
            "ties": self.ties,
            "losses": self.losses,
            "pairs": self.pairs,
            "accuracy": self.accuracy,
        }


@dataclass
class PreferenceReport:
    metric_name: str
    per_dataset: dict[str, PreferenceCell] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def overall_accuracy(self) -> float | None:
        """Unweighted mean of per-dataset accuracies."""
        if not self.per_dataset:
            return None
        values = [cell.accuracy for cell in self.per_dataset.values()]
        return sum(values) / len(values)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_name,
            "per_dataset": {
                ds: cell.to_dict() for ds, cell in sorted(self.per_dataset.items())
            },
            "overall_accuracy": self.overall_accuracy(),
            "metadata": self.metadata,
        }

    def render_text(self) -> str:
        width = max([len(d) for d in self.per_dataset] + [8])
        header = f"{'dataset':{width}} {'wins':>5} {'ties':>5} {'loss':>5} {'acc%':>7}"
        lines = [f"metric: {self.metric_name}", header, "-" * len(header)]
        for ds, cell in sorted(self.per_dataset.items()):
            lines.append(
                f"{ds:{width}} {cell.wins:>5} {cell.ties:>5} {cell.losses:>5} "
                f"{100 * cell.accuracy:>7.1f}"
            )
        lines.append("-" * len(header))
        overall = self.overall_accuracy()
        text = f"{100 * overall:.1f}" if overall is not None else "n/a"
        lines.append(f"{'Avg.':{width}} {'':>5} {'':>5} {'':>5} {text:>7}")
        return "\n".join(lines)


def evaluate_minimal_pairs(
    metric: Metric, pairs, tie_epsilon: float = 0.0
) -> PreferenceReport:
    """Preference accuracy: a win when the metric ranks the better candidate
    higher, half credit for an exact tie (``tie_epsilon`` widens exact to a
    band for low-precision imported scores)."""
    pairs = list(pairs)
    if not pairs:
        raise PreconditionError("evaluate_minimal_pairs: no pairs")
    report = PreferenceReport(metric_name=metric.name)
    report.metadata["tie_epsilon"] = tie_epsilon
    for pair in pairs:
        s1 = metric.score(
            pair.passage, pair.question, pair.reference, pair.candidate_1,
            f"{pair.pair_id}::c1",
        )
        s2 = metric.score(
            pair.passage, pair.question, pair.reference, pair.candidate_2,
            f"{pair.pair_id}::c2",
        )
        cell = report.per_dataset.setdefault(pair.dataset_id, PreferenceCell())
        if abs(s1 - s2) <= tie_epsilon:
            cell.ties += 1
        elif s1 > s2:
            cell.wins += 1
        else:
            cell.losses += 1
    return report


@dataclass(frozen=True)
class DivergenceEntry:
    instance_id: str
    score_a: float
    score_b: float
    delta: float
    rank: int

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "score_a": self.score_a,
            "score_b": self.score_b,
            "delta": self.delta,
            "rank": self.rank,
        }


def top_divergences(
    scores_a: dict[str, float], scores_b: dict[str, float], k: int
) -> list[DivergenceEntry]:
    """Top-k instances by |score_a - score_b|, ties broken by instance id;
    ranks are dense over distinct deltas."""
    if set(scores_a) != set(scores_b):
        only_a = sorted(set(scores_a) - set(scores_b))[:5]
        only_b = sorted(set(scores_b) - set(scores_a))[:5]
        raise PreconditionError(
            f"top_divergences: key sets differ (a-only: {only_a}, b-only: {only_b})"
        )
    if k < 0:
        raise PreconditionError("top_divergences: k must be >= 0")
    rows = sorted(
        ((abs(scores_a[i] - scores_b[i]), i) for i in scores_a),
        key=lambda t: (-t[0], t[1]),
    )[:k]
    entries = []
    rank = 0
    prev_delta = None
    for delta, instance_id in rows:
        if prev_delta is None or delta != prev_delta:
            rank += 1
            prev_delta = delta
        entries.append(
            DivergenceEntry(
                instance_id=instance_id,
                score_a=scores_a[instance_id],
                score_b=scores_b[instance_id],
                delta=delta,
                rank=rank,
            )
        )
    return entries
