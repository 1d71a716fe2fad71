"""Deterministic seed derivation for nested experiment randomness."""

import hashlib

_SEP = b"\x1f"


def derive_seed(*parts) -> int:
    """Derive a 64-bit sub-seed from a master seed and context labels.

    The same (master seed, strategy name, run index, ...) tuple always maps
    to the same sub-seed, independent of platform and process, so every run
    in a report can be reproduced in isolation.
    """
    h = hashlib.sha256()
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(_SEP)
    return int.from_bytes(h.digest()[:8], "big")
