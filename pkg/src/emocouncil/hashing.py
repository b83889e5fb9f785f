"""FNV-1a hashing and the deterministic hashed bag-of-words embedder.

Both exist so the whole pipeline can run offline with outputs that tests
can predict exactly; the real embedding model is a configuration swap.
"""

from __future__ import annotations

import math
import re

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

# maximal runs of Unicode alphanumerics (underscore excluded)
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def fnv1a_64_hex(text: str) -> str:
    """FNV-1a 64 of UTF-8 text as a 16-digit lowercase hex string."""
    return f"{fnv1a_64(text.encode('utf-8')):016x}"


def tokenize(text: str) -> list[str]:
    """Lowercased tokens split on non-alphanumerics."""
    return _TOKEN_RE.findall(text.lower())


class HashEmbedder:
    """Hashed bag-of-words embedder: token counts in FNV buckets, L2-normalized.

    Deterministic for a fixed input. If the input contains no alphanumeric
    token at all (e.g. pure punctuation), the raw trimmed string is hashed
    as a single token so the result is never the zero vector.
    """

    def __init__(self, dimension: int = 256):
        if dimension <= 0:
            raise ValueError("embedder dimension must be positive")
        self.dimension = dimension

    def embed(self, text: str) -> list[float]:
        trimmed = text.strip()
        if not trimmed:
            raise ValueError("cannot embed empty text")
        tokens = tokenize(trimmed) or [trimmed]
        counts = [0.0] * self.dimension
        for token in tokens:
            counts[fnv1a_64(token.encode("utf-8")) % self.dimension] += 1.0
        norm = math.sqrt(sum(c * c for c in counts))
        return [c / norm for c in counts]
