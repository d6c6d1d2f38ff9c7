"""Candidate filters applied at ingest time.

Both filters are idempotent and preserve input order.
"""

from __future__ import annotations

import re
from typing import Iterable

from ..lexical.normalize import normalize_tokenize
from .types import JudgedInstance

# Optional sign, digits with optional 3-digit thousands groups, optional
# single decimal part. Number words ("eighteen") are not numeric.
_NUMERIC = re.compile(r"^[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?$")


def is_numeric_token(token: str) -> bool:
    return bool(_NUMERIC.match(token))


def filter_exact_match(instances: Iterable[JudgedInstance]) -> list[JudgedInstance]:
    """Drop instances whose normalized candidate equals the normalized
    reference."""
    return [
        inst
        for inst in instances
        if normalize_tokenize(inst.candidate) != normalize_tokenize(inst.reference)
    ]


def filter_numeric_pairs(instances: Iterable[JudgedInstance]) -> list[JudgedInstance]:
    """Drop instances where reference and candidate are both single numeric
    tokens (span-style number-vs-number comparisons carry no signal).

    Normalization deletes '.' characters, which would mangle decimals like
    "1,234.5"; the raw whitespace token is therefore accepted as numeric
    too.
    """

    def purely_numeric(text: str) -> bool:
        tokens = normalize_tokenize(text)
        if len(tokens) != 1:
            return False
        raw = text.split()
        return is_numeric_token(tokens[0]) or (
            len(raw) == 1 and is_numeric_token(raw[0])
        )

    return [
        inst
        for inst in instances
        if not (purely_numeric(inst.reference) and purely_numeric(inst.candidate))
    ]
