"""Deterministic per-stage seed derivation from a single global seed."""

import hashlib


def stage_seed(seed: int, *stage: object) -> int:
    """Derive a 32-bit seed for a named pipeline stage.

    All randomness in a run flows from one global seed; each stage gets
    its own decorrelated stream by hashing the stage name (and any extra
    qualifiers, e.g. sweep-cell coordinates) into the seed.
    """
    key = "|".join([str(seed)] + [str(part) for part in stage])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")
