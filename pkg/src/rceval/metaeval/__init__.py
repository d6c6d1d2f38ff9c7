from .correlation import pearson
from .metrics import (
    Metric,
    constant_metric,
    gold_oracle_metric,
    import_external_scores,
    learned_metric,
    lexical_metric,
    scores_from_mapping,
    transformed_metric,
    write_score_file,
)
from .reports import (
    CorrelationCell,
    CorrelationReport,
    DivergenceEntry,
    PreferenceCell,
    PreferenceReport,
    evaluate_correlation,
    evaluate_minimal_pairs,
    per_source_correlation,
    top_divergences,
)
from .experiments import CheckpointInfo, TrainRecipe, run_ad, run_ood

__all__ = [
    "CheckpointInfo",
    "CorrelationCell",
    "CorrelationReport",
    "DivergenceEntry",
    "Metric",
    "PreferenceCell",
    "PreferenceReport",
    "TrainRecipe",
    "constant_metric",
    "evaluate_correlation",
    "evaluate_minimal_pairs",
    "gold_oracle_metric",
    "import_external_scores",
    "learned_metric",
    "lexical_metric",
    "pearson",
    "per_source_correlation",
    "run_ad",
    "run_ood",
    "scores_from_mapping",
    "top_divergences",
    "transformed_metric",
    "write_score_file",
]
