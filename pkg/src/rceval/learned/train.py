"""Training loops: answer-pair pre-training and judgment fine-tuning.

Both phases share the same machinery: a learning-rate grid where every
trial starts from the identical initial parameters, per-epoch evaluation
on held-out data, and selection of the best (trial, epoch) snapshot by
the phase's selection metric (accuracy for pre-training, Pearson for
fine-tuning). All shuffling derives from the config seed, so a run is
reproducible bit-for-bit.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import PreconditionError, UndefinedCorrelationError
from ..util import subseed
from .encoder import Encoder
from .heads import ClassificationHead, RegressionHead
from .model import CorrectnessModel, PairClassifierModel, pad_batch
from .packing import FULL_ABLATION, SEGMENT_NAMES

log = logging.getLogger(__name__)

LABEL_TO_INT = {"first_correct": 0, "second_correct": 1, "both_correct": 2}

DEFAULT_LR_GRID = (1e-5, 2e-5, 3e-5)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    epochs: int = 3
    learning_rate: float = 2e-5
    seed: int = 0
    ablation: frozenset[str] = FULL_ABLATION
    selection_metric: str = "pearson"  # "accuracy" for pre-training
    weight_decay: float = 0.01
    warmup_frac: float = 0.1
    use_bias: bool = True
    selection_pooling: str = "pooled"  # or "per_dataset_mean"

    def __post_init__(self):
        if self.batch_size <= 0 or self.epochs <= 0 or self.learning_rate <= 0:
            raise ValueError("batch_size, epochs, learning_rate must be positive")
        if not self.ablation or not frozenset(self.ablation) <= frozenset(SEGMENT_NAMES):
            raise ValueError(f"ablation must be a nonempty subset of {SEGMENT_NAMES}")
        if self.selection_metric not in ("accuracy", "pearson"):
            raise ValueError("selection_metric must be 'accuracy' or 'pearson'")
        if self.selection_pooling not in ("pooled", "per_dataset_mean"):
            raise ValueError("selection_pooling must be 'pooled' or 'per_dataset_mean'")
        object.__setattr__(self, "ablation", frozenset(self.ablation))

    def to_dict(self) -> dict:
        return {
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "ablation": sorted(self.ablation),
            "selection_metric": self.selection_metric,
            "weight_decay": self.weight_decay,
            "warmup_frac": self.warmup_frac,
            "use_bias": self.use_bias,
            "selection_pooling": self.selection_pooling,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        if "ablation" in d:
            d["ablation"] = frozenset(d["ablation"])
        return cls(**d)


def _no_decay(name: str) -> bool:
    leaf = name.split(".")[-1]
    return leaf.startswith("b") or "ln" in name


class AdamW:
    """Adam with decoupled weight decay; decay skips biases and layer norms."""

    def __init__(self, params: dict[str, np.ndarray], weight_decay: float = 0.01,
                 betas=(0.9, 0.999), eps: float = 1e-8):
        self.params = params
        self.weight_decay = weight_decay
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads: dict[str, np.ndarray], lr: float) -> None:
        self.t += 1
        bc1 = 1.0 - self.b1**self.t
        bc2 = 1.0 - self.b2**self.t
        for name, p in self.params.items():
            g = grads[name]
            m = self.m[name]
            v = self.v[name]
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            update = (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            p -= lr * update
            if self.weight_decay and not _no_decay(name):
                p -= lr * self.weight_decay * p


def _lr_schedule(step: int, total_steps: int, base_lr: float, warmup_frac: float) -> float:
    """Linear warmup to base_lr, constant afterwards."""
    warmup = max(1, round(total_steps * warmup_frac))
    if step < warmup:
        return base_lr * (step + 1) / warmup
    return base_lr


def _batches(n: int, batch_size: int, rng: random.Random):
    order = list(range(n))
    rng.shuffle(order)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    selection_value: float | None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "selection_value": self.selection_value,
            **self.extra,
        }


@dataclass
class TrainHistory:
    phase: str
    runs: list[dict] = field(default_factory=list)
    selected: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"phase": self.phase, "runs": self.runs, "selected": self.selected}


def _select_best(runs: list[dict]) -> dict:
    """Highest selection value wins; ties go to the earliest (run, epoch)."""
    best = None
    for run_idx, run in enumerate(runs):
        for rec in run["epochs"]:
            value = rec["selection_value"]
            if value is None:
                continue
            key = (-value, run_idx, rec["epoch"])
            if best is None or key < best[0]:
                best = (key, run_idx, rec)
    if best is None:
        # no held-out signal anywhere: fall back to the final epoch of the
        # run with the lowest final training loss
        log.warning("no held-out selection signal; falling back to final epoch")
        run_idx = min(
            range(len(runs)), key=lambda i: runs[i]["epochs"][-1]["train_loss"]
        )
        rec = runs[run_idx]["epochs"][-1]
        return {"run": run_idx, "lr": runs[run_idx]["learning_rate"],
                "epoch": rec["epoch"], "selection_value": None,
                "fallback": "final_epoch"}
    _, run_idx, rec = best
    return {"run": run_idx, "lr": runs[run_idx]["learning_rate"],
            "epoch": rec["epoch"], "selection_value": rec["selection_value"]}


def pretrain(
    encoder: Encoder,
    examples,
    config: TrainConfig,
    heldout,
    lr_grid=None,
) -> tuple[Encoder, ClassificationHead, TrainHistory]:
    """3-way answer-pair classification over the learning-rate grid.

    Returns the encoder (restored to the best snapshot), the matching head,
    and the full per-run history.
    """
    examples = list(examples)
    heldout = list(heldout)
    if not examples:
        raise PreconditionError("pretrain: no training examples")
    if config.selection_metric != "accuracy":
        raise PreconditionError("pretrain selection_metric must be 'accuracy'")
    if not heldout:
        log.warning("pretrain: empty held-out set; selection falls back to final epoch")
    grid = list(lr_grid) if lr_grid else [config.learning_rate]

    init_state = encoder.get_state()
    head0 = ClassificationHead(encoder.hidden_size, seed=subseed(config.seed, "clf-head"))
    head_init = {k: v.copy() for k, v in head0.params().items()}

    model = PairClassifierModel(encoder, head0, ablation=config.ablation)
    train_packed = [model.pack(e.passage, e.question, e.answer_1, e.answer_2) for e in examples]
    train_labels = np.array([LABEL_TO_INT[e.label.value] for e in examples])
    held_packed = [model.pack(e.passage, e.question, e.answer_1, e.answer_2) for e in heldout]
    held_labels = np.array([LABEL_TO_INT[e.label.value] for e in heldout])

    def heldout_accuracy() -> float | None:
        if not heldout:
            return None
        logits = _forward_logits(encoder, head0, held_packed, config.batch_size)
        return float(np.mean(np.argmax(logits, axis=1) == held_labels))

    history = TrainHistory(phase="pretrain")
    snapshots: list[tuple[dict, dict]] = []
    for run_idx, lr in enumerate(grid):
        encoder.set_state(init_state)
        for k, v in head0.params().items():
            v[...] = head_init[k]
        run_cfg = replace(config, learning_rate=lr)
        records = _run_classification_trial(
            encoder, head0, train_packed, train_labels, run_cfg,
            heldout_accuracy, run_idx, snapshots,
        )
        history.runs.append(
            {"learning_rate": lr, "epochs": [r.to_dict() for r in records]}
        )

    history.selected = _select_best(history.runs)
    best_enc, best_head = snapshots[_snapshot_index(history)]
    encoder.set_state(best_enc)
    for k, v in head0.params().items():
        v[...] = best_head[k]
    return encoder, head0, history


def _snapshot_index(history: TrainHistory) -> int:
    run = history.selected["run"]
    epoch = history.selected["epoch"]
    epochs_per_run = [len(r["epochs"]) for r in history.runs]
    return sum(epochs_per_run[:run]) + (epoch - 1)


def _forward_logits(encoder, head, packed, batch_size):
    chunks = []
    for start in range(0, len(packed), batch_size):
        ids, mask = pad_batch(packed[start : start + batch_size])
        hidden, _ = encoder.forward_batch(ids, mask)
        chunks.append(head.forward(hidden[:, 0, :]))
    return np.concatenate(chunks, axis=0)


def _run_classification_trial(
    encoder, head, packed, labels, config, heldout_accuracy, run_idx, snapshots
) -> list[EpochRecord]:
    params = {**encoder.params(), **head.params()}
    opt = AdamW(params, weight_decay=config.weight_decay)
    steps_per_epoch = (len(packed) + config.batch_size - 1) // config.batch_size
    total_steps = steps_per_epoch * config.epochs
    shuffle_rng = random.Random(subseed(config.seed, "pretrain-shuffle", str(run_idx)))
    records = []
    step = 0
    for epoch in range(1, config.epochs + 1):
        losses = []
        for batch in _batches(len(packed), config.batch_size, shuffle_rng):
            ids, mask = pad_batch([packed[i] for i in batch])
            hidden, cache = encoder.forward_batch(ids, mask)
            loss, head_grads, d_pooled = head.loss_and_grads(
                hidden[:, 0, :], labels[batch]
            )
            d_hidden = np.zeros_like(hidden)
            d_hidden[:, 0, :] = d_pooled
            grads = encoder.backward_batch(cache, d_hidden)
            grads.update(head_grads)
            lr = _lr_schedule(step, total_steps, config.learning_rate, config.warmup_frac)
            opt.step(grads, lr)
            step += 1
            losses.append(loss)
        records.append(
            EpochRecord(
                epoch=epoch,
                train_loss=float(np.mean(losses)),
                selection_value=heldout_accuracy(),
            )
        )
        snapshots.append(
            (encoder.get_state(), {k: v.copy() for k, v in head.params().items()})
        )
    return records


def finetune(
    model: CorrectnessModel,
    instances,
    config: TrainConfig,
    dev,
    lr_grid=None,
) -> tuple[CorrectnessModel, TrainHistory]:
    """MSE training on gold judgment scores, selected by dev Pearson."""
    instances = list(instances)
    dev = list(dev)
    if not instances:
        raise PreconditionError("finetune: no training instances")
    if config.selection_metric != "pearson":
        raise PreconditionError("finetune selection_metric must be 'pearson'")
    for inst in instances:
        if inst.gold_score is None:
            raise PreconditionError(
                f"finetune: instance {inst.dataset_id}/{inst.instance_id} has no gold score"
            )
    if not dev:
        log.warning("finetune: empty dev set; selection falls back to final epoch")
    grid = list(lr_grid) if lr_grid else [config.learning_rate]

    encoder, head = model.encoder, model.head
    init_state = encoder.get_state()
    head_init = {k: v.copy() for k, v in head.params().items()}

    train_packed = [
        model.pack(i.passage, i.question, i.reference, i.candidate) for i in instances
    ]
    targets = np.array([i.gold_score for i in instances], dtype=np.float64)
    dev_packed = [
        model.pack(i.passage, i.question, i.reference, i.candidate) for i in dev
    ]
    dev_gold = np.array([i.gold_score for i in dev], dtype=np.float64)
    dev_datasets = sorted({i.dataset_id for i in dev})

    def dev_pearson() -> float | None:
        if not dev:
            return None
        preds = _forward_raw(encoder, head, dev_packed, config.batch_size)
        return _selection_pearson(preds, dev_gold, [i.dataset_id for i in dev], config)

    history = TrainHistory(phase="finetune")
    snapshots: list[tuple[dict, dict]] = []
    for run_idx, lr in enumerate(grid):
        encoder.set_state(init_state)
        for k, v in head.params().items():
            v[...] = head_init[k]
        run_cfg = replace(config, learning_rate=lr)
        records = _run_regression_trial(
            encoder, head, train_packed, targets, run_cfg, dev_pearson,
            run_idx, snapshots, dev_datasets,
        )
        history.runs.append(
            {"learning_rate": lr, "epochs": [r.to_dict() for r in records]}
        )

    history.selected = _select_best(history.runs)
    best_enc, best_head = snapshots[_snapshot_index(history)]
    encoder.set_state(best_enc)
    for k, v in head.params().items():
        v[...] = best_head[k]
    return model, history


def _selection_pearson(preds, gold, dataset_ids, config) -> float | None:
    from ..metaeval.correlation import pearson  # deferred: avoids module cycle

    try:
        if config.selection_pooling == "pooled":
            return pearson(list(preds), list(gold))
        by_ds: dict[str, list[int]] = {}
        for idx, ds in enumerate(dataset_ids):
            by_ds.setdefault(ds, []).append(idx)
        values = [
            pearson([preds[i] for i in idxs], [gold[i] for i in idxs])
            for idxs in by_ds.values()
            if len(idxs) >= 2
        ]
        return float(np.mean(values)) if values else None
    except UndefinedCorrelationError:
        return None


def _forward_raw(encoder, head, packed, batch_size):
    chunks = []
    for start in range(0, len(packed), batch_size):
        ids, mask = pad_batch(packed[start : start + batch_size])
        hidden, _ = encoder.forward_batch(ids, mask)
        chunks.append(head.forward(hidden[:, 0, :]))
    return np.concatenate(chunks, axis=0)


def _run_regression_trial(
    encoder, head, packed, targets, config, dev_pearson, run_idx, snapshots,
    dev_datasets,
) -> list[EpochRecord]:
    params = {**encoder.params(), **head.params()}
    opt = AdamW(params, weight_decay=config.weight_decay)
    steps_per_epoch = (len(packed) + config.batch_size - 1) // config.batch_size
    total_steps = steps_per_epoch * config.epochs
    shuffle_rng = random.Random(subseed(config.seed, "finetune-shuffle", str(run_idx)))
    records = []
    step = 0
    for epoch in range(1, config.epochs + 1):
        losses = []
        for batch in _batches(len(packed), config.batch_size, shuffle_rng):
            ids, mask = pad_batch([packed[i] for i in batch])
            hidden, cache = encoder.forward_batch(ids, mask)
            loss, head_grads, d_pooled = head.loss_and_grads(
                hidden[:, 0, :], targets[batch]
            )
            d_hidden = np.zeros_like(hidden)
            d_hidden[:, 0, :] = d_pooled
            grads = encoder.backward_batch(cache, d_hidden)
            grads.update(head_grads)
            lr = _lr_schedule(step, total_steps, config.learning_rate, config.warmup_frac)
            opt.step(grads, lr)
            step += 1
            losses.append(loss)
        records.append(
            EpochRecord(
                epoch=epoch,
                train_loss=float(np.mean(losses)),
                selection_value=dev_pearson(),
                extra={"dev_datasets": dev_datasets},
            )
        )
        snapshots.append(
            (encoder.get_state(), {k: v.copy() for k, v in head.params().items()})
        )
    return records
