"""Hybrid retrieval: approximate semantic candidates re-ranked by a fusion
of normalized cosine, BM25 lexical score, and a binary topic boost.

BM25 uses the Okapi form with the saturation-smoothed idf
``ln(1 + (N - df + 0.5)/(df + 0.5))`` so scores stay nonnegative. Semantic
and lexical components are min-max normalized over the candidate set per
query (the two raw scales are incomparable); when max == min, a value maps
to 1.0 if it is positive, else 0.0.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any

from .embeddings import EmbeddingProvider, embed
from .errors import EmptyIndex, EmptyQuery
from .index import VectorIndex
from .textutil import match_tokens


@dataclass(frozen=True)
class RetrievalConfig:
    k_candidates: int = 25
    k_final: int = 5
    w_semantic: float = 0.70
    w_lexical: float = 0.25
    w_metadata: float = 0.05
    bm25_k1: float = 1.2
    bm25_b: float = 0.75

    def __post_init__(self) -> None:
        weights = (self.w_semantic, self.w_lexical, self.w_metadata)
        if any(w < 0 for w in weights):
            raise ValueError("fusion weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"fusion weights must sum to 1, got {sum(weights)}")
        if self.k_final > self.k_candidates:
            raise ValueError("k_final must be <= k_candidates")


@dataclass(frozen=True)
class CorpusStats:
    """Document frequencies and length statistics over the chunk store."""

    n_chunks: int
    mean_tokens: float
    doc_freq: dict[str, int]

    @classmethod
    def from_chunks(cls, chunks: list[dict]) -> "CorpusStats":
        df: dict[str, int] = {}
        total = 0
        for chunk in chunks:
            tokens = match_tokens(chunk["text"])
            total += len(tokens)
            for t in set(tokens):
                df[t] = df.get(t, 0) + 1
        n = len(chunks)
        return cls(n_chunks=n, mean_tokens=(total / n) if n else 0.0, doc_freq=df)


@dataclass
class RetrievedItem:
    chunk_id: str
    text: str
    topic: str
    semantic: float  # normalized over candidates
    lexical: float  # normalized over candidates
    metadata_boost: float
    fused: float
    semantic_raw: float
    lexical_raw: float


@dataclass
class RetrievalResult:
    query: str
    items: list[RetrievedItem]
    timings: dict[str, float] = field(default_factory=dict)


def lexical_score(query_tokens: list[str], chunk: dict, stats: CorpusStats, cfg: RetrievalConfig) -> float:
    """Raw BM25 of one chunk for the query's unique tokens."""
    if stats.n_chunks == 0:
        return 0.0
    tokens = match_tokens(chunk["text"])
    if not tokens:
        return 0.0
    tf: dict[str, int] = {}
    for t in tokens:
        tf[t] = tf.get(t, 0) + 1
    norm_len = len(tokens) / stats.mean_tokens if stats.mean_tokens else 1.0
    k1, b = cfg.bm25_k1, cfg.bm25_b
    score = 0.0
    # sorted: float summation order must not depend on set iteration order,
    # or scores drift in the last ulp across processes
    for t in sorted(set(query_tokens)):
        f = tf.get(t)
        if not f:
            continue
        df = stats.doc_freq.get(t, 0)
        idf = math.log(1.0 + (stats.n_chunks - df + 0.5) / (df + 0.5))
        score += idf * (f * (k1 + 1.0)) / (f + k1 * (1.0 - b + b * norm_len))
    return score


def metadata_boost(query_tokens: list[str], chunk: dict) -> float:
    """1.0 when any query token occurs in the chunk topic, else 0.0."""
    topic_tokens = set(match_tokens(chunk.get("topic", "")))
    if not topic_tokens:
        return 0.0
    return 1.0 if any(t in topic_tokens for t in query_tokens) else 0.0


def _minmax(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0 if v > 0 else 0.0 for v in values]
    return [(v - lo) / (hi - lo) for v in values]


def retrieve(
    query: str,
    cfg: RetrievalConfig,
    idx: VectorIndex,
    provider: EmbeddingProvider,
    stats: CorpusStats,
) -> RetrievalResult:
    """ANN candidates → component scores → weighted fusion → top k_final."""
    if not query.strip():
        raise EmptyQuery("query text is empty")
    if len(idx) == 0:
        raise EmptyIndex("index has no entries")

    t0 = time.perf_counter()
    qv = embed(provider, query)
    t1 = time.perf_counter()
    candidates = idx.ann_search(qv, cfg.k_candidates)
    t2 = time.perf_counter()

    query_tokens = match_tokens(query)
    chunks = [idx.metadata(cid) for cid, _ in candidates]
    sem_raw = [score for _, score in candidates]
    lex_raw = [lexical_score(query_tokens, c, stats, cfg) for c in chunks]
    boosts = [metadata_boost(query_tokens, c) for c in chunks]
    sem_n = _minmax(sem_raw)
    lex_n = _minmax(lex_raw)

    items = []
    for (cid, _), chunk, s, l, bst, s_raw, l_raw in zip(
        candidates, chunks, sem_n, lex_n, boosts, sem_raw, lex_raw
    ):
        fused = cfg.w_semantic * s + cfg.w_lexical * l + cfg.w_metadata * bst
        items.append(
            RetrievedItem(
                chunk_id=cid,
                text=chunk["text"],
                topic=chunk.get("topic", ""),
                semantic=s,
                lexical=l,
                metadata_boost=bst,
                fused=fused,
                semantic_raw=s_raw,
                lexical_raw=l_raw,
            )
        )
    items.sort(key=lambda it: (-it.fused, it.chunk_id))
    t3 = time.perf_counter()
    return RetrievalResult(
        query=query,
        items=items[: cfg.k_final],
        timings={
            "embed_ms": (t1 - t0) * 1000.0,
            "search_ms": (t2 - t1) * 1000.0,
            "rerank_ms": (t3 - t2) * 1000.0,
        },
    )


def item_to_dict(item: RetrievedItem) -> dict[str, Any]:
    return {
        "chunk_id": item.chunk_id,
        "text": item.text,
        "topic": item.topic,
        "semantic": item.semantic,
        "lexical": item.lexical,
        "metadata_boost": item.metadata_boost,
        "fused": item.fused,
    }
