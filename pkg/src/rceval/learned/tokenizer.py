"""Deterministic hashing tokenizer for the trainable metric.

Token ids come from a stable CRC32 hash, so the vocabulary needs no
fitting step and is identical across runs and platforms. Ids 0..2 are
reserved for padding, the pooled-position marker, and the segment
separator.
"""

from __future__ import annotations

import zlib

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
_N_SPECIAL = 3


class HashTokenizer:
    def __init__(self, vocab_size: int = 2048):
        if vocab_size <= _N_SPECIAL:
            raise ValueError("vocab_size must exceed the reserved ids")
        self.vocab_size = vocab_size

    def tokens(self, text: str) -> list[str]:
        return text.lower().split()

    def id_of(self, token: str) -> int:
        return _N_SPECIAL + zlib.crc32(token.encode("utf-8")) % (
            self.vocab_size - _N_SPECIAL
        )

    def ids(self, tokens: list[str]) -> list[int]:
        return [self.id_of(t) for t in tokens]
