from .tokenizer import HashTokenizer, CLS_ID, PAD_ID, SEP_ID
from .packing import FULL_ABLATION, SEGMENT_NAMES, PackedInput, pack_input
from .encoder import Encoder, TinyTransformerEncoder
from .heads import ClassificationHead, RegressionHead
from .model import (
    CorrectnessModel,
    PairClassifierModel,
    clamp_score,
    pad_batch,
    predict_score,
    score_instances,
)
from .train import (
    DEFAULT_LR_GRID,
    AdamW,
    TrainConfig,
    TrainHistory,
    finetune,
    pretrain,
)
from .checkpoint import (
    FORMAT_VERSION,
    PROBE_INPUT,
    load_checkpoint,
    save_checkpoint,
    training_lock,
)

__all__ = [
    "AdamW",
    "ClassificationHead",
    "CorrectnessModel",
    "DEFAULT_LR_GRID",
    "Encoder",
    "FORMAT_VERSION",
    "FULL_ABLATION",
    "HashTokenizer",
    "PROBE_INPUT",
    "PackedInput",
    "PairClassifierModel",
    "RegressionHead",
    "SEGMENT_NAMES",
    "TinyTransformerEncoder",
    "TrainConfig",
    "TrainHistory",
    "CLS_ID",
    "PAD_ID",
    "SEP_ID",
    "clamp_score",
    "finetune",
    "load_checkpoint",
    "pack_input",
    "pad_batch",
    "predict_score",
    "pretrain",
    "save_checkpoint",
    "score_instances",
    "training_lock",
]
