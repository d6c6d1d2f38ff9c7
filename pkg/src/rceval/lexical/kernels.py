"""Kernel backend selection.

The hot per-pair loops (LCS for ROUGE-L, clipped unigram overlap for
BLEU-1) exist twice: a compiled Cython extension and a pure-Python
fallback. The compiled module is preferred when importable; setting
``RCEVAL_PURE_PYTHON=1`` forces the fallback, which is also what you get
when the extension was never built.

Both backends take integer-encoded token sequences. ``encode_pair``
interns the tokens of one (reference, candidate) pair.
"""

from __future__ import annotations

import os
from array import array
from typing import Sequence

from . import _pykernels

_FORCED_PURE = os.environ.get("RCEVAL_PURE_PYTHON", "") == "1"

if not _FORCED_PURE:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "pure"
else:
    _impl = _pykernels
    BACKEND = "pure"

_USES_MEMORYVIEW = BACKEND == "compiled"


def backend_name() -> str:
    return BACKEND


def encode_pair(ref: Sequence[str], cand: Sequence[str]) -> tuple[Sequence[int], Sequence[int]]:
    """Intern the tokens of one pair into small integer ids."""
    ids: dict[str, int] = {}
    ref_ids = [ids.setdefault(t, len(ids)) for t in ref]
    cand_ids = [ids.setdefault(t, len(ids)) for t in cand]
    if _USES_MEMORYVIEW:
        return array("i", ref_ids), array("i", cand_ids)
    return ref_ids, cand_ids


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    return _impl.lcs_length(a, b)


def clipped_overlap(cand: Sequence[int], ref: Sequence[int]) -> int:
    return _impl.clipped_overlap(cand, ref)
