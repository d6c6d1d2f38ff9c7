"""Answer-correctness metrics for generative reading comprehension.

Subpackages:
    corpus   -- judged-candidate and minimal-pair corpora: I/O, filters,
                splits, annotation aggregation, inter-annotator agreement
    lexical  -- tokenization and the lexical baselines (BLEU-1, ROUGE-L, METEOR)
    learned  -- the trainable metric: input packing, encoder, heads,
                training loops, checkpoints
    metaeval -- correlation / preference evaluation of any metric against
                human judgments, experiment orchestration
    cli      -- the ``rceval`` command-line entry point
    service  -- HTTP scoring service
"""

__version__ = "0.1.0"
