"""Sentence-similarity retrieval over a case corpus.

The index embeds every corpus sentence with a deterministic hashed
character n-gram encoder and searches them with a small-world graph.
``suggest_cases`` is the approximate route used at runtime;
``exact_topk`` is the exhaustive route kept as a cross-check, so the two
can always be compared on the same index.
"""
from .encoder import HashedNgramEncoder, normalize_text
from .index import (
    RetrievalIndex,
    Suggestion,
    build_index,
    exact_topk,
    segment_sentences,
    suggest_cases,
)
from .nsw import NswParams

__all__ = [
    "HashedNgramEncoder",
    "NswParams",
    "RetrievalIndex",
    "Suggestion",
    "build_index",
    "exact_topk",
    "normalize_text",
    "segment_sentences",
    "suggest_cases",
]
