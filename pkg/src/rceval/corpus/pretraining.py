"""Build 3-way-labeled answer pairs from multiple-choice questions.

Each (correct, distractor) combination yields exactly one example whose
answer order is randomized at construction time, so training data stays
fixed across epochs. Every question also yields one both-correct example:
a distinct correct pair when the question has two or more correct options,
otherwise the single correct answer duplicated.
"""

from __future__ import annotations

import random

from ..errors import PreconditionError
from .types import MCExample, PretrainExample, PretrainLabel


def build_pretrain_examples(mc: MCExample, rng: random.Random) -> list[PretrainExample]:
    problems = mc.validation_problems()
    if problems:
        raise PreconditionError("; ".join(problems))
    corrects = sorted(mc.correct_indices)
    distractors = [i for i in range(len(mc.options)) if i not in mc.correct_indices]

    examples = []
    for c in corrects:
        for d in distractors:
            if rng.random() < 0.5:
                first, second, label = c, d, PretrainLabel.FIRST_CORRECT
            else:
                first, second, label = d, c, PretrainLabel.SECOND_CORRECT
            examples.append(
                PretrainExample(
                    passage=mc.passage,
                    question=mc.question,
                    answer_1=mc.options[first],
                    answer_2=mc.options[second],
                    label=label,
                )
            )
    if len(corrects) >= 2:
        both = (mc.options[corrects[0]], mc.options[corrects[1]])
    else:
        both = (mc.options[corrects[0]], mc.options[corrects[0]])
    examples.append(
        PretrainExample(
            passage=mc.passage,
            question=mc.question,
            answer_1=both[0],
            answer_2=both[1],
            label=PretrainLabel.BOTH_CORRECT,
        )
    )
    return examples
