"""Acceptance suite: one test per release criterion, at pinned tolerances.

The terminal summary (see conftest) prints one pass/fail line per
criterion.
"""

import itertools
import json
import math
import random
import time
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from rceval.corpus import (
    AnnotationTable,
    MCExample,
    PretrainLabel,
    build_pretrain_examples,
    krippendorff_alpha,
)
from rceval.errors import UndefinedCorrelationError
from rceval.learned import (
    CLS_ID,
    SEP_ID,
    FULL_ABLATION,
    ClassificationHead,
    CorrectnessModel,
    HashTokenizer,
    RegressionHead,
    TinyTransformerEncoder,
    TrainConfig,
    finetune,
    pack_input,
    score_instances,
)
from rceval.lexical import bleu1, meteor, normalize_tokenize, rouge_l
from rceval.metaeval import (
    TrainRecipe,
    constant_metric,
    evaluate_minimal_pairs,
    gold_oracle_metric,
    learned_metric,
    lexical_metric,
    pearson,
    run_ood,
    scores_from_mapping,
)
from rceval.service import create_app

from helpers import make_instance, make_pair, synthetic_corpus
from oracles import brute_rouge_l, coincidence_alpha

REPO_ROOT = Path(__file__).resolve().parents[1]

FIG_PASSAGE = (
    "Behind one door is a lady whom the king has deemed an appropriate match "
    "for the accused; behind the other is a fierce, hungry tiger. Both doors "
    "are heavily soundproofed to prevent the accused from hearing what is "
    "behind each one."
)
FIG_QUESTION = "What feature do the doors have?"
FIG_REFERENCE = "soundproofed"
FIG_CANDIDATE = (
    "They are heavily soundproofed to prevent the accused from hearing "
    "what's behind each one."
)


def test_c01_lexical_anchor_pair():
    start = time.perf_counter()
    ref = normalize_tokenize(FIG_REFERENCE)
    cand = normalize_tokenize(FIG_CANDIDATE)
    assert abs(bleu1(ref, cand) - 0.07) <= 0.01
    assert abs(rouge_l(ref, cand) - 0.15) <= 0.02
    assert abs(meteor(ref, cand) - 0.17) <= 0.06
    assert time.perf_counter() - start < 1.0


def test_c02_metric_oracles():
    rng = random.Random(99)
    vocab = list("abcdefg")
    for _ in range(500):
        ref = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
        cand = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
        assert rouge_l(ref, cand) == brute_rouge_l(ref, cand)
    assert abs(bleu1(["a"], ["a", "a", "a"]) - 1.0 / 3.0) < 1e-9
    assert abs(bleu1(["a", "b", "c"], ["a"]) - math.exp(-2.0)) < 1e-9
    assert abs(meteor(["a", "b", "c"], ["a", "b", "c"]) - (1.0 - 0.5 / 27.0)) < 1e-9
    assert abs(meteor(["a", "b"], ["b", "a"]) - 0.5) < 1e-9


def test_c03_pearson():
    assert abs(pearson([1, 2, 3], [1, 2, 3]) - 1.0) < 1e-9
    assert abs(pearson([1, 2, 3], [3, 2, 1]) - (-1.0)) < 1e-9
    assert abs(pearson([1, 2, 3, 4], [1, 3, 2, 4]) - 0.8) < 1e-9
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(3, 50))
        xs = rng.normal(size=n)
        ys = rng.normal(size=n)
        r = pearson(list(xs), list(ys))
        a = float(rng.uniform(0.1, 8.0))
        b = float(rng.uniform(-4.0, 4.0))
        assert abs(pearson(list(a * xs + b), list(ys)) - r) <= 1e-12
        assert abs(pearson(list(xs), list(a * ys + b)) - r) <= 1e-12
        assert abs(pearson(list(-a * xs + b), list(ys)) + r) <= 1e-12
    with pytest.raises(UndefinedCorrelationError):
        pearson([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


def _random_pair_sets(rng, n_sets=100):
    for _ in range(n_sets):
        pairs = []
        for ds in ("a", "b", "c")[: rng.randint(1, 3)]:
            for k in range(rng.randint(1, 6)):
                pairs.append(make_pair(pair_id=f"{ds}-{k}", dataset_id=ds))
        scores = {}
        for p in pairs:
            scores[f"{p.pair_id}::c1"] = rng.choice([0.0, 0.2, 0.5, 0.8, 1.0])
            scores[f"{p.pair_id}::c2"] = rng.choice([0.0, 0.2, 0.5, 0.8, 1.0])
        yield pairs, scores


def test_c04_minimal_pair_protocol():
    pairs = [
        make_pair(pair_id=f"{ds}-{k}", dataset_id=ds)
        for ds in ("d1", "d2") for k in range(4)
    ]
    gold = gold_oracle_metric([], pairs)
    assert evaluate_minimal_pairs(gold, pairs).overall_accuracy() == 1.0
    assert evaluate_minimal_pairs(constant_metric(3.0), pairs).overall_accuracy() == 0.5
    rng = random.Random(23)
    for pair_set, scores in _random_pair_sets(rng, 100):
        metric = scores_from_mapping(scores, "m")
        negated = scores_from_mapping({k: -v for k, v in scores.items()}, "-m")
        acc = evaluate_minimal_pairs(metric, pair_set).overall_accuracy()
        neg = evaluate_minimal_pairs(negated, pair_set).overall_accuracy()
        assert abs(acc + neg - 1.0) < 1e-12


def test_c05_pretrain_construction_matches_brute_force():
    for n_options in range(1, 5):
        options = tuple(f"o{i}" for i in range(n_options))
        for r in range(1, n_options + 1):
            for correct in itertools.combinations(range(n_options), r):
                mc = MCExample(passage="p", question="q", options=options,
                               correct_indices=frozenset(correct))
                out = build_pretrain_examples(mc, random.Random(13))
                corrects = {options[i] for i in correct}
                distractors = set(options) - corrects
                assert len(out) == len(corrects) * len(distractors) + 1
                both = [e for e in out if e.label == PretrainLabel.BOTH_CORRECT]
                assert len(both) == 1
                if len(corrects) == 1:
                    only = next(iter(corrects))
                    assert (both[0].answer_1, both[0].answer_2) == (only, only)
                else:
                    assert both[0].answer_1 in corrects
                    assert both[0].answer_2 in corrects
                    assert both[0].answer_1 != both[0].answer_2
                seen = []
                for e in out:
                    if e.label == PretrainLabel.FIRST_CORRECT:
                        assert e.answer_1 in corrects and e.answer_2 in distractors
                        seen.append(frozenset({e.answer_1, e.answer_2}))
                    elif e.label == PretrainLabel.SECOND_CORRECT:
                        assert e.answer_2 in corrects and e.answer_1 in distractors
                        seen.append(frozenset({e.answer_1, e.answer_2}))
                expected = {frozenset({c, d}) for c in corrects for d in distractors}
                assert sorted(seen, key=sorted) == sorted(expected, key=sorted)


def _fd_check(loss_fn, array, index, analytic, eps=1e-6):
    original = array[index]
    array[index] = original + eps
    hi = loss_fn()
    array[index] = original - eps
    lo = loss_fn()
    array[index] = original
    numeric = (hi - lo) / (2 * eps)
    denom = max(abs(analytic), abs(numeric), 1e-8)
    return abs(analytic - numeric) / denom


def test_c06_gradient_checks():
    start = time.perf_counter()
    encoder = TinyTransformerEncoder(
        vocab_size=128, hidden_size=16, num_layers=2, num_heads=2,
        ffn_size=24, max_len=32, seed=8,
    )
    reg = RegressionHead(16, seed=9)
    clf = ClassificationHead(16, seed=10)
    rng = np.random.default_rng(12)
    words = ["cat", "dog", "sun", "sky", "red", "dry"]

    def batch():
        packed = []
        for _ in range(3):
            t = lambda n: " ".join(rng.choice(words) for _ in range(n))
            packed.append(pack_input(t(4), t(2), t(2), t(3),
                                     tokenizer=encoder.tokenizer, max_len=32))
        from rceval.learned import pad_batch
        return pad_batch(packed)

    for probe in range(20):
        ids, mask = batch()
        targets = rng.uniform(1, 5, size=3)
        labels = rng.integers(0, 3, size=3)

        def mse():
            hidden, _ = encoder.forward_batch(ids, mask)
            preds = reg.forward(hidden[:, 0, :])
            return float(np.mean((preds - targets) ** 2))

        hidden, _ = encoder.forward_batch(ids, mask)
        _, grads, _ = reg.loss_and_grads(hidden[:, 0, :], targets)
        for name, array in reg.params().items():
            flat = list(np.ndindex(*array.shape))
            index = flat[int(rng.integers(len(flat)))]
            assert _fd_check(mse, array, index, grads[name][index]) < 1e-3

        def ce():
            hidden, _ = encoder.forward_batch(ids, mask)
            probs = clf.softmax(clf.forward(hidden[:, 0, :]))
            return float(-np.mean(np.log(probs[np.arange(3), labels])))

        _, grads, _ = clf.loss_and_grads(hidden[:, 0, :], labels)
        for name, array in clf.params().items():
            flat = list(np.ndindex(*array.shape))
            index = flat[int(rng.integers(len(flat)))]
            assert _fd_check(ce, array, index, grads[name][index]) < 1e-3
    assert time.perf_counter() - start < 30.0


def _overlap_instances(n=32, seed=7):
    rng = random.Random(seed)
    vocab = ["river", "stone", "market", "letter", "garden", "signal", "window", "harbor"]
    out = []
    for k in range(n):
        ref = [rng.choice(vocab) for _ in range(rng.randint(3, 6))]
        keep = rng.randint(0, len(ref))
        cand = ref[:keep] + [rng.choice(vocab) for _ in range(rng.randint(1, 3))]
        out.append(make_instance(
            instance_id=f"s{k}", passage="shared little passage",
            question="how much overlap", reference=" ".join(ref),
            candidate=" ".join(cand), gold_score=1 + 4 * keep / len(ref),
            split="train"))
    return out


def _overfit_once():
    encoder = TinyTransformerEncoder(
        vocab_size=512, hidden_size=32, num_layers=2, num_heads=4,
        ffn_size=64, max_len=64, seed=11,
    )
    model = CorrectnessModel(encoder, RegressionHead(32, seed=12))
    instances = _overlap_instances(32)
    config = TrainConfig(batch_size=32, epochs=200, learning_rate=3e-3, seed=5,
                         selection_metric="pearson")
    model, history = finetune(model, instances, config, dev=[])
    losses = [rec["train_loss"] for rec in history.runs[0]["epochs"]]
    preds = score_instances(model, instances)
    return losses, preds, [i.gold_score for i in instances]


def test_c07_overfit_smoke_train():
    start = time.perf_counter()
    losses, preds, golds = _overfit_once()
    assert len(losses) <= 200
    assert losses[-1] < 0.1 * losses[0]
    assert pearson(preds, golds) >= 0.9
    losses_again, preds_again, _ = _overfit_once()
    assert losses_again == losses
    assert preds_again == preds
    assert time.perf_counter() - start < 120.0


def test_c08_packing_property_suite():
    rng = random.Random(4096)
    tokenizer = HashTokenizer()
    words = [f"w{i}" for i in range(40)]
    for _ in range(1000):
        max_len = rng.randint(14, 72)
        floor = max_len - 5
        n_ref = rng.randint(0, floor // 2)
        n_cand = rng.randint(0, floor - n_ref)
        passage = " ".join(rng.choice(words) for _ in range(rng.randint(0, 50)))
        question = " ".join(rng.choice(words) for _ in range(rng.randint(0, 25)))
        reference = " ".join(rng.choice(words) for _ in range(n_ref))
        candidate = " ".join(rng.choice(words) for _ in range(n_cand))
        ablation = frozenset(rng.sample(sorted(FULL_ABLATION), rng.randint(1, 4)))
        packed = pack_input(passage, question, reference, candidate,
                            ablation=ablation, tokenizer=tokenizer, max_len=max_len)
        assert sum(1 for t in packed.token_ids if t == SEP_ID) == 4
        assert packed.token_ids[0] == CLS_ID
        assert len(packed) <= max_len
        if "candidate" in ablation:
            assert packed.decode_segment("candidate") == " ".join(
                tokenizer.tokens(candidate))
        if "reference" in ablation:
            assert packed.decode_segment("reference") == " ".join(
                tokenizer.tokens(reference))
        for name, text in (("passage", passage), ("question", question)):
            kept = list(packed.segment_tokens(name))
            original = tokenizer.tokens(text) if name in ablation else []
            assert kept == original[: len(kept)]


def test_c09_krippendorff_alpha():
    assert abs(
        krippendorff_alpha(
            AnnotationTable({"u1": [("a", 1), ("b", 2)], "u2": [("a", 2), ("b", 1)]})
        )
        - (-0.5)
    ) < 1e-9
    assert abs(
        krippendorff_alpha(
            AnnotationTable({"u1": [("a", 3), ("b", 3)], "u2": [("a", 5), ("b", 5)]})
        )
        - 1.0
    ) < 1e-9
    # exhaustive: alpha depends only on the per-unit score multisets, so all
    # tables with <= 4 units, <= 3 annotators, scores in 1..3 are covered by
    # enumerating per-unit multisets of sizes 1..3 (size-1 units carry no
    # pairable values)
    per_unit = [
        list(combo)
        for size in (1, 2, 3)
        for combo in itertools.combinations_with_replacement((1, 2, 3), size)
    ]
    checked = 0
    for n_units in (1, 2, 3, 4):
        for combo in itertools.product(range(len(per_unit)), repeat=n_units):
            units = {f"u{k}": per_unit[i] for k, i in enumerate(combo)}
            if not any(len(v) >= 2 for v in units.values()):
                continue
            table = AnnotationTable(
                {u: [(f"a{j}", v) for j, v in enumerate(vals)] for u, vals in units.items()}
            )
            assert abs(krippendorff_alpha(table) - coincidence_alpha(units)) < 1e-9
            checked += 1
    assert checked > 100_000


def test_c10_ood_hygiene():
    corpus = synthetic_corpus(n_datasets=3)
    recipe = TrainRecipe(
        config=TrainConfig(batch_size=8, epochs=2, learning_rate=1e-3, seed=3,
                           selection_metric="pearson"),
        lr_grid=(3e-4, 1e-3),
        encoder={"type": "tiny_transformer", "vocab_size": 256, "hidden_size": 16,
                 "num_layers": 1, "num_heads": 2, "ffn_size": 32, "max_len": 64},
    )
    info, corr, _ = run_ood(corpus, [], recipe, held_out="ds1")
    extra = info.provenance["extra"]
    assert extra["held_out"] == "ds1"
    assert "ds1" not in extra["training_datasets"]
    assert "ds1" not in extra["selection_datasets"]
    for run in info.provenance["history"]["runs"]:
        for record in run["epochs"]:
            assert "ds1" not in record["dev_datasets"]
    assert {ds for ds, _ in corr.cells} == {"ds1"}


def test_c11_full_scale_recipe_documented():
    """Full-scale reproduction needs the released 40K-judgment corpus and GPU
    training; CI does not gate on it. The recipe must be documented."""
    recipe = (REPO_ROOT / "docs" / "full_scale_recipe.md").read_text(encoding="utf-8")
    for needle in ("batch size 32", "4 epochs", "3 epochs",
                   "1e-5, 2e-5, 3e-5", "three seeds", "0.751", "0.03"):
        assert needle in recipe, f"recipe missing: {needle}"


def test_c12_service_contract():
    encoder = TinyTransformerEncoder(
        vocab_size=256, hidden_size=16, num_layers=1, num_heads=2,
        ffn_size=32, max_len=64, seed=4,
    )
    model = CorrectnessModel(encoder, RegressionHead(16, seed=5))
    registry = {
        "bleu1": lexical_metric("bleu1"),
        "meteor": lexical_metric("meteor"),
        "judge": learned_metric(model, name="judge"),
    }
    client = TestClient(create_app(registry))

    health = client.get("/v1/health")
    assert health.status_code == 200
    assert set(health.json()["models"]) == set(registry)

    single = client.post("/v1/score", json={
        "passage": "p", "question": "q", "reference": "same words",
        "candidate": "same words", "metric": "bleu1",
    })
    assert single.status_code == 200 and single.json()["score"] == 1.0

    rng = random.Random(77)
    words = ["ash", "oak", "elm", "fir", "yew"]
    items = [
        {
            "passage": "trees grow", "question": "which trees",
            "reference": " ".join(rng.choices(words, k=rng.randint(1, 4))),
            "candidate": " ".join(rng.choices(words, k=rng.randint(1, 4))),
            "metric": rng.choice(sorted(registry)),
        }
        for _ in range(50)
    ]
    batch = client.post("/v1/score/batch", json=items)
    assert batch.status_code == 200
    singles = [client.post("/v1/score", json=item).json() for item in items]
    assert batch.json() == singles

    unknown = client.post("/v1/score", json=dict(items[0], metric="nope"))
    assert unknown.status_code == 400
    assert unknown.json()["code"] == "unknown_metric"
    assert unknown.json()["details"]["valid"] == sorted(registry)

    oversize = client.post("/v1/score/batch", json=[items[0]] * 257)
    assert oversize.status_code == 413
    assert oversize.json()["code"] == "batch_too_large"
