"""Text normalization shared by the lexical metrics and corpus filters.

The rule is deliberately minimal: delete question marks, periods, and
exclamation marks, lowercase, and split on whitespace runs. Commas,
apostrophes, and all other punctuation are kept as part of their token.
"""

from __future__ import annotations

_STRIP = str.maketrans("", "", "?.!")

TokenSequence = list[str]


def normalize_tokenize(text: str) -> TokenSequence:
    """Normalize ``text`` into a lowercase token sequence.

    Empty input (or input that is nothing but stripped punctuation and
    whitespace) yields an empty sequence.
    """
    return text.translate(_STRIP).lower().split()
