"""Small shared helpers: canonical JSON, hashing, labeled sub-seeds."""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(obj: Any) -> str:
    """Deterministic JSON encoding used for manifests and fingerprints."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def manifest_hash(manifest: dict) -> str:
    return sha256_text(canonical_json(manifest))


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def subseed(seed: int, *labels: str) -> int:
    """Derive a labeled sub-seed from one master seed.

    All randomness in a run flows from a single seed; independent consumers
    (shuffling, pair ordering, grid runs) get stable, distinct streams by
    hashing the seed together with a path of labels.
    """
    text = str(seed) + "/" + "/".join(labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)
