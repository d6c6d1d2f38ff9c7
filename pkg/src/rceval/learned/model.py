"""Encoder + head bundles and scoring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoder import Encoder
from .heads import ClassificationHead, RegressionHead
from .packing import FULL_ABLATION, PackedInput, pack_input
from .tokenizer import PAD_ID

SCORE_MIN, SCORE_MAX = 1.0, 5.0


def pad_batch(packed: list[PackedInput]) -> tuple[np.ndarray, np.ndarray]:
    """Right-pad a list of packed inputs into id and mask matrices."""
    width = max(len(p) for p in packed)
    ids = np.full((len(packed), width), PAD_ID, dtype=np.int64)
    mask = np.zeros((len(packed), width), dtype=np.float64)
    for row, p in enumerate(packed):
        ids[row, : len(p)] = p.token_ids
        mask[row, : len(p)] = p.attention_mask
    return ids, mask


@dataclass
class CorrectnessModel:
    """The trainable judgment metric: encoder plus regression head."""

    encoder: Encoder
    head: RegressionHead
    ablation: frozenset[str] = FULL_ABLATION

    def pack(self, passage, question, reference, candidate, ablation=None) -> PackedInput:
        return pack_input(
            passage,
            question,
            reference,
            candidate,
            ablation=self.ablation if ablation is None else ablation,
            tokenizer=self.encoder.tokenizer,
            max_len=self.encoder.max_len,
        )

    def pooled(self, packed: list[PackedInput]) -> np.ndarray:
        ids, mask = pad_batch(packed)
        hidden, _ = self.encoder.forward_batch(ids, mask)
        return hidden[:, 0, :]

    def predict_raw_batch(self, packed: list[PackedInput]) -> np.ndarray:
        return self.head.forward(self.pooled(packed))

    def params(self) -> dict[str, np.ndarray]:
        return {**self.encoder.params(), **self.head.params()}


@dataclass
class PairClassifierModel:
    """Encoder plus 3-way head used during pre-training."""

    encoder: Encoder
    head: ClassificationHead
    ablation: frozenset[str] = FULL_ABLATION

    def pack(self, passage, question, answer_1, answer_2) -> PackedInput:
        # answer pair occupies the reference/candidate slots of the layout
        return pack_input(
            passage,
            question,
            answer_1,
            answer_2,
            ablation=self.ablation,
            tokenizer=self.encoder.tokenizer,
            max_len=self.encoder.max_len,
        )

    def params(self) -> dict[str, np.ndarray]:
        return {**self.encoder.params(), **self.head.params()}


def clamp_score(raw: float) -> float:
    return min(max(raw, SCORE_MIN), SCORE_MAX)


def predict_score(
    model: CorrectnessModel,
    passage: str,
    question: str,
    reference: str,
    candidate: str,
    ablation=None,
) -> tuple[float, float]:
    """Score one tuple; returns (raw, reported) with reported clamped to the
    1..5 judgment scale."""
    packed = model.pack(passage, question, reference, candidate, ablation=ablation)
    raw = float(model.predict_raw_batch([packed])[0])
    return raw, clamp_score(raw)


def score_instances(
    model: CorrectnessModel, instances, batch_size: int = 32
) -> list[float]:
    """Raw scores for judged instances, in input order."""
    out: list[float] = []
    instances = list(instances)
    for start in range(0, len(instances), batch_size):
        chunk = instances[start : start + batch_size]
        packed = [
            model.pack(i.passage, i.question, i.reference, i.candidate) for i in chunk
        ]
        out.extend(float(v) for v in model.predict_raw_batch(packed))
    return out
