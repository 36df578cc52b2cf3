"""Deterministic sentence embeddings from hashed character n-grams.

No trained weights: a sentence is the L2-normalized sum of signed hash
buckets of its character 3-, 4- and 5-grams, with sublinear count
scaling.  The same text always embeds to the same vector, on any machine,
which keeps index builds reproducible and the exact/approximate search
routes comparable.
"""
from __future__ import annotations

import hashlib
import math
import unicodedata
from collections import Counter

import numpy as np

DEFAULT_DIMS = 256
DEFAULT_SEED = 0x5EED
_GRAM_SIZES = (3, 4, 5)


def normalize_text(text: str) -> str:
    """Case-fold, strip accents, collapse whitespace.

    Tribunal text mixes French and English with inconsistent accents and
    spacing; matching on the normalized form keeps "Réponse" and
    "reponse" in the same buckets.
    """
    t = unicodedata.normalize("NFC", text).lower()
    t = unicodedata.normalize("NFD", t)
    t = "".join(c for c in t if not unicodedata.combining(c))
    return " ".join(t.split())


class HashedNgramEncoder:
    """Maps text to a fixed ``dims``-dimensional unit vector.

    Bucket assignment is a keyed blake2b hash of the n-gram, so two
    encoders with the same (dims, seed) agree exactly.  A gram-to-bucket
    memo makes repeat grams (ubiquitous in legal boilerplate) cheap.
    """

    def __init__(self, dims: int = DEFAULT_DIMS, seed: int = DEFAULT_SEED):
        if dims < 1:
            raise ValueError("dims must be positive")
        self.dims = dims
        self.seed = seed
        self._key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
        self._memo: dict[str, tuple[int, float]] = {}

    def _slot(self, gram: str) -> tuple[int, float]:
        hit = self._memo.get(gram)
        if hit is not None:
            return hit
        digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8,
                                 key=self._key).digest()
        value = int.from_bytes(digest, "little")
        slot = ((value >> 1) % self.dims, 1.0 if value & 1 else -1.0)
        self._memo[gram] = slot
        return slot

    def embed(self, text: str) -> np.ndarray:
        """Embed one string.  Texts with no n-grams (shorter than 3
        characters after normalization) embed to the zero vector."""
        t = normalize_text(text)
        counts: Counter[str] = Counter()
        for n in _GRAM_SIZES:
            for i in range(len(t) - n + 1):
                counts[t[i:i + n]] += 1
        vec = np.zeros(self.dims, dtype=np.float64)
        for gram, count in counts.items():
            idx, sign = self._slot(gram)
            vec[idx] += sign * (1.0 + math.log(count))
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)

    def embed_many(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dims), dtype=np.float32)
        for i, text in enumerate(texts):
            out[i] = self.embed(text)
        return out
