"""Domain types for judged-candidate corpora, minimal pairs, and
multiple-choice pre-training data."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from ..errors import PreconditionError
from ..lexical.normalize import normalize_tokenize

SPLITS = ("train", "dev", "test")


class GenerationSource(str, enum.Enum):
    BACKTRANSLATION = "backtranslation"
    GPT2 = "gpt2"
    MHPG = "mhpg"
    SECOND_REFERENCE = "second_reference"
    SPAN_MODEL = "span_model"
    OTHER = "other"


_SOURCE_ALIASES = {
    "backtranslation": GenerationSource.BACKTRANSLATION,
    "back_translation": GenerationSource.BACKTRANSLATION,
    "gpt2": GenerationSource.GPT2,
    "gpt-2": GenerationSource.GPT2,
    "mhpg": GenerationSource.MHPG,
    "second_reference": GenerationSource.SECOND_REFERENCE,
    "reference": GenerationSource.SECOND_REFERENCE,
    "span_model": GenerationSource.SPAN_MODEL,
    "naqanet": GenerationSource.SPAN_MODEL,
    "nabert": GenerationSource.SPAN_MODEL,
}


def parse_generation_source(raw: str | None) -> GenerationSource:
    """Map a raw metadata source string onto the enum; unknowns -> OTHER."""
    if raw is None:
        return GenerationSource.OTHER
    return _SOURCE_ALIASES.get(raw.strip().lower(), GenerationSource.OTHER)


class Phenomenon(str, enum.Enum):
    COREFERENCE = "coreference"
    HYPONYMY = "hyponymy"
    NEGATION = "negation"
    SEMANTIC_ROLE = "semantic_role"
    SYNTAX = "syntax"
    WORD_SENSE = "word_sense"
    OTHER = "other"


class PretrainLabel(str, enum.Enum):
    FIRST_CORRECT = "first_correct"
    SECOND_CORRECT = "second_correct"
    BOTH_CORRECT = "both_correct"


@dataclass(frozen=True)
class JudgedInstance:
    """One (passage, question, reference, candidate) tuple with its human
    judgments.

    ``gold_score`` is the mean of ``annotations`` when annotations exist;
    records without any judgment (``gold_score`` None) are only legal in
    prediction-input files, never in training/eval corpora.
    """

    dataset_id: str
    instance_id: str
    passage: str
    question: str
    reference: str
    candidate: str
    generation_source: GenerationSource = GenerationSource.OTHER
    annotations: tuple[int, ...] = ()
    gold_score: float | None = None
    split: str | None = None

    def validation_problems(self, require_gold: bool = True) -> list[str]:
        problems = []
        annotations_ok = True
        for a in self.annotations:
            if not isinstance(a, int) or isinstance(a, bool) or not 1 <= a <= 5:
                problems.append(f"annotation range: {a!r} is not an integer in 1..5")
                annotations_ok = False
                break
        if annotations_ok and self.annotations and self.gold_score is not None:
            mean = sum(self.annotations) / len(self.annotations)
            if abs(mean - self.gold_score) > 1e-9:
                problems.append(
                    f"score/annotation mismatch: score {self.gold_score} != mean {mean}"
                )
        if self.gold_score is not None and not 1.0 <= self.gold_score <= 5.0:
            problems.append(f"score range: {self.gold_score} not in [1, 5]")
        if require_gold and self.gold_score is None:
            problems.append("missing gold score")
        if self.split is not None and self.split not in SPLITS:
            problems.append(f"split: {self.split!r} not one of {SPLITS}")
        return problems

    def with_split(self, split: str) -> "JudgedInstance":
        return replace(self, split=split)


@dataclass(frozen=True)
class MinimalPair:
    """Two candidates for one question with a strict human preference."""

    dataset_id: str
    pair_id: str
    passage: str
    question: str
    reference: str
    candidate_1: str
    candidate_2: str
    score_1: float
    score_2: float
    phenomenon: Phenomenon

    def validation_problems(self) -> list[str]:
        problems = []
        for name, score in (("score1", self.score_1), ("score2", self.score_2)):
            if not 1.0 <= score <= 5.0:
                problems.append(f"{name} range: {score} not in [1, 5]")
        if not self.score_1 > self.score_2:
            problems.append(
                f"score ordering: score1 ({self.score_1}) must exceed score2 ({self.score_2})"
            )
        return problems


@dataclass(frozen=True)
class MCExample:
    """A multiple-choice question used to build pre-training pairs."""

    passage: str
    question: str
    options: tuple[str, ...]
    correct_indices: frozenset[int]

    def validation_problems(self) -> list[str]:
        problems = []
        if not self.options:
            problems.append("options: must be nonempty")
        if not self.correct_indices:
            problems.append("correct: must be nonempty")
        bad = [i for i in self.correct_indices if not 0 <= i < len(self.options)]
        if bad:
            problems.append(f"correct: indices {sorted(bad)} out of range")
        return problems


@dataclass(frozen=True)
class PretrainExample:
    """An ordered answer pair with its 3-way correctness label."""

    passage: str
    question: str
    answer_1: str
    answer_2: str
    label: PretrainLabel


@dataclass
class AnnotationTable:
    """Scores grouped by unit for agreement computation.

    ``rows`` maps a unit id to its (annotator_id, score) pairs. Units with a
    single score carry no pairing information and are excluded from
    agreement.
    """

    rows: dict[str, list[tuple[str, int]]] = field(default_factory=dict)

    def add(self, unit_id: str, annotator_id: str, score: int) -> None:
        self.rows.setdefault(unit_id, []).append((annotator_id, score))

    def pairable_units(self) -> dict[str, list[int]]:
        return {
            unit: [score for _, score in scores]
            for unit, scores in self.rows.items()
            if len(scores) >= 2
        }

    @classmethod
    def from_instances(cls, instances) -> "AnnotationTable":
        table = cls()
        for inst in instances:
            for k, score in enumerate(inst.annotations):
                table.add(f"{inst.dataset_id}/{inst.instance_id}", f"a{k}", score)
        return table


def aggregate_gold(annotations) -> float:
    """Arithmetic mean of ordinal annotations; the gold judgment score."""
    annotations = list(annotations)
    if not annotations:
        raise PreconditionError("aggregate_gold: empty annotation list")
    for a in annotations:
        if not isinstance(a, int) or isinstance(a, bool) or not 1 <= a <= 5:
            raise PreconditionError(
                f"aggregate_gold: annotation {a!r} is not an integer in 1..5"
            )
    return sum(annotations) / len(annotations)


def passage_key(dataset_id: str, passage: str) -> tuple[str, str]:
    """Identity of a passage for split assignment: normalized text scoped to
    its dataset."""
    return (dataset_id, " ".join(normalize_tokenize(passage)))
