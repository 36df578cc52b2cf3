"""Case suggestion on top of the sentence graph.

Corpus sentences are indexed individually; a case's score for a query is
the best score among its sentences.  ``suggest_cases`` searches the graph
with a beam that widens until enough distinct cases are covered, then
once more for stability.  ``exact_topk`` scans every sentence and is the
reference the approximate route is measured against.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyCorpusError, EmptyQueryError
from .encoder import HashedNgramEncoder, normalize_text
from .nsw import NswGraph, NswParams

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")
MIN_SENTENCE_TOKENS = 3


def segment_sentences(text: str) -> list[str]:
    """Split running text into sentences on ./!/? boundaries, dropping
    fragments under three tokens (headings, numbers, stray citations)."""
    parts = _SENTENCE_BREAK.split(text)
    out = []
    for part in parts:
        part = part.strip()
        if len(part.split()) >= MIN_SENTENCE_TOKENS:
            out.append(part)
    return out


@dataclass
class Suggestion:
    case_id: str
    score: float
    best_sentence: str


class RetrievalIndex:
    """Immutable sentence index grouped by case.

    ``sentence_case[i]`` maps sentence ordinal i to its position in
    ``case_ids``; ``matrix`` holds the embedded sentences row-aligned
    with ``sentences``.
    """

    def __init__(self, case_ids: list[str], sentences: list[str],
                 sentence_case: np.ndarray, matrix: np.ndarray,
                 graph: NswGraph, encoder: HashedNgramEncoder,
                 params: NswParams):
        self.case_ids = case_ids
        self.sentences = sentences
        self.sentence_case = sentence_case
        self.matrix = matrix
        self.graph = graph
        self.encoder = encoder
        self.params = params

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    @property
    def n_cases(self) -> int:
        return len(self.case_ids)


def _corpus_pairs(corpus) -> list[tuple[str, list[str]]]:
    pairs = []
    for item in corpus:
        if isinstance(item, tuple):
            case_id, sentences = item
        else:
            case_id, sentences = item.case_id, item.sentences
        pairs.append((case_id, list(sentences)))
    return pairs


def build_index(corpus, params: NswParams | None = None,
                encoder: HashedNgramEncoder | None = None) -> RetrievalIndex:
    """Build a searchable index from (case_id, sentences) pairs or corpus
    records.  Sentences that are empty after normalization are skipped; a
    corpus with nothing left to index is refused."""
    params = params or NswParams()
    encoder = encoder or HashedNgramEncoder()
    pairs = _corpus_pairs(corpus)

    case_ids: list[str] = []
    sentences: list[str] = []
    sentence_case: list[int] = []
    for case_id, case_sentences in pairs:
        case_idx = len(case_ids)
        case_ids.append(case_id)
        for sentence in case_sentences:
            if not normalize_text(sentence):
                continue
            sentences.append(sentence)
            sentence_case.append(case_idx)
    if not sentences:
        raise EmptyCorpusError("corpus has no non-empty sentences to index")

    matrix = encoder.embed_many(sentences)
    graph = NswGraph(matrix, params)
    return RetrievalIndex(
        case_ids=case_ids,
        sentences=sentences,
        sentence_case=np.asarray(sentence_case, dtype=np.int32),
        matrix=matrix,
        graph=graph,
        encoder=encoder,
        params=params,
    )


def _embed_query(index: RetrievalIndex, query: str) -> np.ndarray:
    if not normalize_text(query):
        raise EmptyQueryError("query is empty after normalization")
    return index.encoder.embed(query)


def _rank_cases(index: RetrievalIndex,
                ordinals: np.ndarray, sims: np.ndarray,
                k: int) -> list[Suggestion]:
    """Collapse best-first sentence hits to per-case best sentences and
    rank cases by (score desc, case_id asc)."""
    best: dict[int, tuple[float, int]] = {}
    for ordinal, sim in zip(ordinals.tolist(), sims.tolist()):
        case_idx = int(index.sentence_case[ordinal])
        if case_idx not in best:
            best[case_idx] = (float(sim), int(ordinal))
    ranked = sorted(
        ((index.case_ids[case_idx], score, ordinal)
         for case_idx, (score, ordinal) in best.items()),
        key=lambda row: (-row[1], row[0]))
    return [Suggestion(case_id=case_id, score=score,
                       best_sentence=index.sentences[ordinal])
            for case_id, score, ordinal in ranked[:k]]


def suggest_cases(index: RetrievalIndex, query: str,
                  k: int = 100) -> list[Suggestion]:
    """Approximate top-k cases for a query.

    The beam starts at max(ef_search, k) sentences and doubles until it
    has seen k distinct cases (a case has several sentences, so a fixed
    sentence beam may cover too few cases), then doubles once more so the
    tail of the ranking is not an artifact of the stopping point.
    """
    q = _embed_query(index, query)
    n = index.n_sentences
    want = min(k, index.n_cases)
    ef = min(n, max(index.params.ef_search, k))
    stabilized = False
    while True:
        ordinals, sims = index.graph.search(q, ef)
        covered = len({int(index.sentence_case[o]) for o in ordinals}) >= want
        if ef >= n or (covered and stabilized):
            break
        if covered:
            stabilized = True
        ef = min(n, ef * 2)
    return _rank_cases(index, ordinals, sims, k)


def exact_topk(index: RetrievalIndex, query: str,
               k: int = 100) -> list[Suggestion]:
    """Exhaustive top-k cases: scores every sentence with one matrix
    product.  Shares only the embedding with the graph route, which makes
    it a genuine cross-check on graph search."""
    q = _embed_query(index, query)
    sims = index.matrix @ q
    order = np.argsort(-sims, kind="stable")
    return _rank_cases(index, order.astype(np.int64), sims[order], k)
