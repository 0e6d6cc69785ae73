"""Stable seed derivation for reproducible trials.

Python's builtin ``hash()`` is randomized per process for strings, so trial
seeds are derived from a SHA-256 digest instead.  The same inputs give the
same seed on any platform and in any process.
"""

import hashlib


def derive_seed(*parts) -> int:
    """Mix arbitrary labels/ints into a 63-bit seed, deterministically."""
    text = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
