"""Packing (passage, question, reference, candidate) into one encoder input.

Layout is fixed: a pooled-position marker, then the four segments each
terminated by a separator. Segments outside the ablation set are emptied
but keep their separators, so the encoder always sees the same frame.
When the budget overflows, the passage is truncated from its end first,
then the question; reference and candidate are never truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import PackingLengthError
from .tokenizer import CLS_ID, SEP_ID, HashTokenizer

SEGMENT_NAMES = ("passage", "question", "reference", "candidate")
FULL_ABLATION = frozenset(SEGMENT_NAMES)


@dataclass(frozen=True)
class PackedInput:
    """Token ids plus the boundary map over the five-part layout."""

    token_ids: tuple[int, ...]
    tokens: tuple[str, ...]  # parallel surface forms ("[CLS]"/"[SEP]" markers)
    segments: dict[str, tuple[int, int]]  # name -> [start, end) span
    sep_positions: tuple[int, int, int, int]
    attention_mask: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.token_ids)

    def segment_tokens(self, name: str) -> tuple[str, ...]:
        start, end = self.segments[name]
        return self.tokens[start:end]

    def decode_segment(self, name: str) -> str:
        return " ".join(self.segment_tokens(name))


def pack_input(
    passage: str,
    question: str,
    reference: str,
    candidate: str,
    ablation: frozenset[str] | set[str] = FULL_ABLATION,
    tokenizer: HashTokenizer | None = None,
    max_len: int = 512,
) -> PackedInput:
    ablation = frozenset(ablation)
    if not ablation or not ablation <= FULL_ABLATION:
        raise ValueError(
            f"ablation must be a nonempty subset of {SEGMENT_NAMES}, got {sorted(ablation)}"
        )
    tokenizer = tokenizer or HashTokenizer()
    texts = {
        "passage": passage,
        "question": question,
        "reference": reference,
        "candidate": candidate,
    }
    segs = {
        name: (tokenizer.tokens(texts[name]) if name in ablation else [])
        for name in SEGMENT_NAMES
    }

    # 1 marker + 4 separators
    overhead = 5
    fixed = len(segs["reference"]) + len(segs["candidate"]) + overhead
    if fixed > max_len:
        blame = "reference" if len(segs["reference"]) + overhead > max_len else "candidate"
        raise PackingLengthError(
            blame,
            f"reference+candidate occupy {fixed} of {max_len} positions; "
            f"segment '{blame}' cannot be truncated",
        )
    overflow = len(segs["passage"]) + len(segs["question"]) + fixed - max_len
    if overflow > 0:
        cut = min(len(segs["passage"]), overflow)
        segs["passage"] = segs["passage"][: len(segs["passage"]) - cut]
        overflow -= cut
    if overflow > 0:
        segs["question"] = segs["question"][: len(segs["question"]) - overflow]

    tokens: list[str] = ["[CLS]"]
    ids: list[int] = [CLS_ID]
    spans: dict[str, tuple[int, int]] = {"cls": (0, 1)}
    seps: list[int] = []
    for name in SEGMENT_NAMES:
        start = len(tokens)
        tokens.extend(segs[name])
        ids.extend(tokenizer.ids(segs[name]))
        spans[name] = (start, len(tokens))
        seps.append(len(tokens))
        tokens.append("[SEP]")
        ids.append(SEP_ID)

    return PackedInput(
        token_ids=tuple(ids),
        tokens=tuple(tokens),
        segments=spans,
        sep_positions=tuple(seps),
        attention_mask=tuple([1] * len(ids)),
    )
