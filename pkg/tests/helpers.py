"""Shared builders for test corpora."""

from __future__ import annotations

import random

from rceval.corpus import GenerationSource, JudgedInstance, MinimalPair, Phenomenon


def make_instance(
    instance_id="i0",
    dataset_id="toy",
    passage="a passage about things",
    question="what things",
    reference="the things",
    candidate="those things",
    gold_score=3.0,
    annotations=(),
    split=None,
    generation_source=GenerationSource.OTHER,
):
    return JudgedInstance(
        dataset_id=dataset_id,
        instance_id=instance_id,
        passage=passage,
        question=question,
        reference=reference,
        candidate=candidate,
        generation_source=generation_source,
        annotations=tuple(annotations),
        gold_score=gold_score,
        split=split,
    )


def make_pair(
    pair_id="p0",
    dataset_id="toy",
    score_1=5.0,
    score_2=1.0,
    candidate_1="good answer",
    candidate_2="bad answer",
    phenomenon=Phenomenon.OTHER,
):
    return MinimalPair(
        dataset_id=dataset_id,
        pair_id=pair_id,
        passage="a passage",
        question="a question",
        reference="a reference",
        candidate_1=candidate_1,
        candidate_2=candidate_2,
        score_1=score_1,
        score_2=score_2,
        phenomenon=phenomenon,
    )


_WORDS = [
    "river", "stone", "market", "letter", "garden", "signal", "window",
    "harbor", "animal", "forest", "bridge", "candle", "meadow", "shadow",
]


def random_text(rng: random.Random, lo=2, hi=8) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(lo, hi)))


def synthetic_corpus(
    n_datasets=3, passages_per_dataset=4, instances_per_passage=4, seed=13
):
    """A small corpus with deterministic golds spread over splits."""
    rng = random.Random(seed)
    instances = []
    for d in range(n_datasets):
        dataset = f"ds{d}"
        for p in range(passages_per_dataset):
            passage = random_text(rng, 6, 12)
            for k in range(instances_per_passage):
                split = ("train", "train", "dev", "test")[k % 4]
                reference = random_text(rng, 2, 5)
                # overlap-controlled candidate so metrics carry signal
                ref_tokens = reference.split()
                keep = rng.randint(0, len(ref_tokens))
                cand_tokens = ref_tokens[:keep] + random_text(rng, 1, 3).split()
                gold = round(1 + 4 * keep / max(len(ref_tokens), 1), 6)
                instances.append(
                    make_instance(
                        instance_id=f"{dataset}-p{p}-i{k}",
                        dataset_id=dataset,
                        passage=passage,
                        question=random_text(rng, 3, 6),
                        reference=reference,
                        candidate=" ".join(cand_tokens),
                        gold_score=gold,
                        split=split,
                        generation_source=rng.choice(list(GenerationSource)),
                    )
                )
    return instances
