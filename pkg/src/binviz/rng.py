"""Deterministic sub-seed derivation.

Python's builtin ``hash`` is salted per process, so sub-seeds are derived
from SHA-256 instead. Mixing the context (family name, tree index, ...)
into the seed keeps independent consumers on independent streams: adding a
family never perturbs another family's shuffle, and forest trees can train
in parallel from pre-drawn seeds.
"""

import hashlib


def subseed(*parts):
    """Stable 64-bit seed derived from the given parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
