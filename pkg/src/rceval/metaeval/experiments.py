"""Experiment orchestration for the trainable metric.

Two protocols:

* held-out-dataset (``run_ood``): train and tune on every dataset except
  the one being evaluated; nothing from the held-out dataset may influence
  training or model selection.
* all-datasets (``run_ad``): one model trained on every training split,
  tuned on the pooled dev split, evaluated per dataset.

Both stamp the resulting checkpoint provenance with the exact dataset ids
used for training and selection, so hygiene is auditable from the manifest
alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import PreconditionError
from ..learned.checkpoint import save_checkpoint, training_lock
from ..learned.encoder import TinyTransformerEncoder
from ..learned.heads import RegressionHead
from ..learned.model import CorrectnessModel
from ..learned.train import DEFAULT_LR_GRID, TrainConfig, finetune
from ..util import manifest_hash, subseed
from .metrics import learned_metric
from .reports import (
    CorrelationReport,
    PreferenceReport,
    evaluate_correlation,
    evaluate_minimal_pairs,
)


@dataclass
class TrainRecipe:
    """Everything needed to reproduce a fine-tuning run."""

    config: TrainConfig = field(default_factory=lambda: TrainConfig(selection_metric="pearson"))
    lr_grid: tuple[float, ...] = DEFAULT_LR_GRID
    encoder: dict = field(
        default_factory=lambda: {
            "type": "tiny_transformer",
            "vocab_size": 2048,
            "hidden_size": 32,
            "num_layers": 2,
            "num_heads": 4,
            "ffn_size": 64,
            "max_len": 128,
        }
    )

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "lr_grid": list(self.lr_grid),
            "encoder": dict(self.encoder),
        }

    def build_model(self) -> CorrectnessModel:
        desc = dict(self.encoder)
        desc.setdefault("type", "tiny_transformer")
        desc["seed"] = subseed(self.config.seed, "encoder-init")
        encoder = TinyTransformerEncoder.from_description(desc)
        head = RegressionHead(
            encoder.hidden_size,
            use_bias=self.config.use_bias,
            seed=subseed(self.config.seed, "reg-head"),
        )
        return CorrectnessModel(encoder, head, ablation=self.config.ablation)


@dataclass
class CheckpointInfo:
    """A trained model plus its provenance (and directory when persisted)."""

    model: CorrectnessModel
    provenance: dict
    path: str | None = None


def _fit(corpus, recipe: TrainRecipe, train_datasets: set[str],
         selection_datasets: set[str], setting: str,
         checkpoint_dir=None) -> CheckpointInfo:
    train = [
        i for i in corpus if i.split == "train" and i.dataset_id in train_datasets
    ]
    dev = [
        i for i in corpus if i.split == "dev" and i.dataset_id in selection_datasets
    ]
    if not train:
        raise PreconditionError(f"{setting}: no training instances")
    model = recipe.build_model()
    model, history = finetune(model, train, recipe.config, dev, lr_grid=recipe.lr_grid)

    manifest = {
        "setting": setting,
        "recipe": recipe.to_dict(),
        "training_datasets": sorted({i.dataset_id for i in train}),
        "selection_datasets": sorted({i.dataset_id for i in dev}),
    }
    extra = dict(manifest, manifest_hash=manifest_hash(manifest))
    provenance = {
        "history": history.to_dict(),
        "extra": extra,
    }
    info = CheckpointInfo(model=model, provenance=provenance)
    if checkpoint_dir is not None:
        with training_lock(checkpoint_dir):
            save_checkpoint(
                checkpoint_dir,
                model.encoder,
                model.head,
                history,
                recipe.config,
                lr_grid=recipe.lr_grid,
                extra=extra,
            )
        info.path = str(checkpoint_dir)
    return info


def run_ood(
    corpus,
    pairs,
    recipe: TrainRecipe,
    held_out: str,
    checkpoint_dir=None,
) -> tuple[CheckpointInfo, CorrelationReport, PreferenceReport]:
    """Hold one dataset out of training and tuning, then evaluate on it."""
    corpus = list(corpus)
    datasets = {i.dataset_id for i in corpus}
    if held_out not in datasets:
        raise PreconditionError(f"run_ood: held-out dataset {held_out!r} not in corpus")
    others = datasets - {held_out}
    if not others:
        raise PreconditionError("run_ood: corpus has no dataset besides the held-out one")

    info = _fit(
        corpus, recipe, train_datasets=others, selection_datasets=others,
        setting="ood", checkpoint_dir=checkpoint_dir,
    )
    info.provenance["extra"]["held_out"] = held_out

    metric = learned_metric(info.model, name=f"learned[ood:{held_out}]")
    held_instances = [i for i in corpus if i.dataset_id == held_out]
    corr = evaluate_correlation(metric, held_instances, splits=("dev", "test"))
    corr.metadata["manifest_hash"] = info.provenance["extra"]["manifest_hash"]
    corr.metadata["held_out"] = held_out

    held_pairs = [p for p in pairs if p.dataset_id == held_out]
    if held_pairs:
        pref = evaluate_minimal_pairs(metric, held_pairs)
    else:
        pref = PreferenceReport(metric_name=metric.name)
    pref.metadata["manifest_hash"] = info.provenance["extra"]["manifest_hash"]
    pref.metadata["held_out"] = held_out
    return info, corr, pref


def run_ad(
    corpus,
    recipe: TrainRecipe,
    checkpoint_dir=None,
) -> tuple[CheckpointInfo, CorrelationReport]:
    """Train on every dataset, tune on the pooled dev split, evaluate per
    dataset."""
    corpus = list(corpus)
    datasets = {i.dataset_id for i in corpus}
    if not datasets:
        raise PreconditionError("run_ad: empty corpus")
    info = _fit(
        corpus, recipe, train_datasets=datasets, selection_datasets=datasets,
        setting="ad", checkpoint_dir=checkpoint_dir,
    )
    metric = learned_metric(info.model, name="learned[ad]")
    corr = evaluate_correlation(metric, corpus, splits=("dev", "test"))
    corr.metadata["manifest_hash"] = info.provenance["extra"]["manifest_hash"]
    return info, corr
