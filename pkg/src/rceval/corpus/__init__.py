from .types import (
    AnnotationTable,
    GenerationSource,
    JudgedInstance,
    MCExample,
    MinimalPair,
    Phenomenon,
    PretrainExample,
    PretrainLabel,
    aggregate_gold,
    parse_generation_source,
    passage_key,
)
from .io import (
    RecordProblem,
    load_corpus,
    read_judged,
    read_mc,
    read_minimal_pairs,
    write_judged,
    write_mc,
    write_minimal_pairs,
)
from .filters import filter_exact_match, filter_numeric_pairs, is_numeric_token
from .splits import apply_split, split_by_passage
from .agreement import krippendorff_alpha
from .pretraining import build_pretrain_examples
from .stats import CorpusStatistics, corpus_statistics, score_histogram

__all__ = [
    "AnnotationTable",
    "GenerationSource",
    "JudgedInstance",
    "MCExample",
    "MinimalPair",
    "Phenomenon",
    "PretrainExample",
    "PretrainLabel",
    "RecordProblem",
    "CorpusStatistics",
    "aggregate_gold",
    "apply_split",
    "build_pretrain_examples",
    "corpus_statistics",
    "score_histogram",
    "filter_exact_match",
    "filter_numeric_pairs",
    "is_numeric_token",
    "krippendorff_alpha",
    "load_corpus",
    "parse_generation_source",
    "passage_key",
    "read_judged",
    "read_mc",
    "read_minimal_pairs",
    "split_by_passage",
    "write_judged",
    "write_mc",
    "write_minimal_pairs",
]
