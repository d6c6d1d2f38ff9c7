"""Checkpoint directories.

Layout:
    params.npz       -- all parameter arrays ("encoder/..." and "head/...")
    provenance.json  -- format version, architecture, config, seed, data
                        fingerprints, full per-epoch history
    probe.json       -- a fixed probe input and its raw output, re-verified
                        on load so a stale or corrupt checkpoint can never
                        silently return different scores

Writes go to a temporary sibling directory first and are renamed into
place, so an interrupted save never leaves a half-written checkpoint. A
lock file serializes training runs targeting the same directory.
"""

from __future__ import annotations

import datetime
import json
import math
import os
import shutil
import tempfile
import zipfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from filelock import FileLock, Timeout

from ..errors import CheckpointError, TrainingLockedError
from .encoder import TinyTransformerEncoder
from .heads import ClassificationHead, RegressionHead
from .model import CorrectnessModel, PairClassifierModel
from .train import TrainConfig, TrainHistory

FORMAT_VERSION = 1

PROBE_INPUT = {
    "passage": "The clockmaker kept a spare brass key under the workbench.",
    "question": "Where was the spare key kept?",
    "reference": "under the workbench",
    "candidate": "beneath the workbench",
}


def _probe_raw(encoder, head, ablation) -> float:
    if isinstance(head, RegressionHead):
        model = CorrectnessModel(encoder, head, ablation=ablation)
        packed = model.pack(**PROBE_INPUT)
        return float(model.predict_raw_batch([packed])[0])
    model = PairClassifierModel(encoder, head, ablation=ablation)
    packed = model.pack(
        PROBE_INPUT["passage"], PROBE_INPUT["question"],
        PROBE_INPUT["reference"], PROBE_INPUT["candidate"],
    )
    from .model import pad_batch

    ids, mask = pad_batch([packed])
    hidden, _ = encoder.forward_batch(ids, mask)
    return float(head.forward(hidden[:, 0, :])[0, 0])


@contextmanager
def training_lock(path):
    """Hold the checkpoint-directory lock for the duration of a run."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(path / ".lock"), timeout=0)
    try:
        with lock:
            yield
    except Timeout:
        raise TrainingLockedError(
            f"another training run holds the lock on {path}"
        ) from None


def save_checkpoint(
    path,
    encoder,
    head,
    history: TrainHistory | None,
    config: TrainConfig,
    lr_grid=None,
    data_fingerprints: dict | None = None,
    extra: dict | None = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    arrays = {f"encoder/{k}": v for k, v in encoder.params().items()}
    arrays.update({f"head/{k}": v for k, v in head.params().items()})
    provenance = {
        "format_version": FORMAT_VERSION,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "encoder": encoder.describe(),
        "head": head.describe(),
        "config": config.to_dict(),
        "lr_grid": list(lr_grid) if lr_grid else [config.learning_rate],
        "optimizer": {"name": "adamw", "schedule": "linear_warmup_then_constant"},
        "data_fingerprints": data_fingerprints or {},
        "history": history.to_dict() if history is not None else None,
        "extra": extra or {},
    }
    probe = {
        "input": dict(PROBE_INPUT, ablation=sorted(config.ablation)),
        "raw": _probe_raw(encoder, head, config.ablation),
    }

    tmp = Path(tempfile.mkdtemp(prefix=path.name + ".tmp-", dir=path.parent))
    try:
        with open(tmp / "params.npz", "wb") as f:
            np.savez(f, **arrays)
        (tmp / "provenance.json").write_text(
            json.dumps(provenance, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        (tmp / "probe.json").write_text(
            json.dumps(probe, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        if path.exists():
            # keep the lock file, replace everything else atomically per file
            for name in ("params.npz", "provenance.json", "probe.json"):
                os.replace(tmp / name, path / name)
            shutil.rmtree(tmp)
        else:
            os.replace(tmp, path)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def load_checkpoint(path):
    """Load a checkpoint; returns (model, provenance).

    The model is a ``CorrectnessModel`` or ``PairClassifierModel`` depending
    on the stored head. Any missing file, parse failure, version mismatch,
    or probe mismatch raises ``CheckpointError`` without producing a
    partially loaded model.
    """
    path = Path(path)
    try:
        provenance = json.loads((path / "provenance.json").read_text(encoding="utf-8"))
        probe = json.loads((path / "probe.json").read_text(encoding="utf-8"))
        with np.load(path / "params.npz") as npz:
            arrays = {k: npz[k] for k in npz.files}
    except FileNotFoundError as e:
        raise CheckpointError(f"{path}: missing checkpoint file ({e.filename})") from e
    except (json.JSONDecodeError, ValueError, OSError, KeyError, zipfile.BadZipFile) as e:
        raise CheckpointError(f"{path}: truncated or corrupt checkpoint: {e}") from e

    version = provenance.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint format {version!r} incompatible with supported {FORMAT_VERSION}"
        )

    try:
        encoder = TinyTransformerEncoder.from_description(provenance["encoder"])
        head_desc = provenance["head"]
        config = TrainConfig.from_dict(provenance["config"])
        if head_desc["type"] == "regression":
            head = RegressionHead(head_desc["hidden_size"], use_bias=head_desc["use_bias"])
        elif head_desc["type"] == "classification":
            head = ClassificationHead(head_desc["hidden_size"])
        else:
            raise CheckpointError(f"{path}: unknown head type {head_desc['type']!r}")
        encoder.set_state(
            {k.removeprefix("encoder/"): v for k, v in arrays.items() if k.startswith("encoder/")}
        )
        head_state = {
            k.removeprefix("head/"): v for k, v in arrays.items() if k.startswith("head/")
        }
        for k, v in head.params().items():
            v[...] = head_state[k]
    except CheckpointError:
        raise
    except Exception as e:
        raise CheckpointError(f"{path}: truncated or corrupt checkpoint: {e}") from e

    recomputed = _probe_raw(encoder, head, config.ablation)
    stored = probe["raw"]
    if not math.isclose(recomputed, stored, rel_tol=1e-9, abs_tol=1e-12):
        raise CheckpointError(
            f"{path}: probe mismatch (stored {stored}, recomputed {recomputed}); "
            "checkpoint incompatible with this code version"
        )

    if head_desc["type"] == "regression":
        model = CorrectnessModel(encoder, head, ablation=config.ablation)
    else:
        model = PairClassifierModel(encoder, head, ablation=config.ablation)
    return model, provenance
