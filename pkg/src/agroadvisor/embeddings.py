"""Embedding providers and the unit-norm vector type.

Providers must be deterministic: the same text always yields the same
vector. The offline fallback hashes character 3–5-grams of each word
(signed feature hashing) into a fixed-width vector, so embeddings are
invariant under word reordering but not under word substitution — enough
semantics for CI and desk-scale retrieval without any model weights.
"""

from __future__ import annotations

import hashlib
import json
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import requests

from .errors import DimensionMismatch, EmptyInput, ProviderUnavailable
from .textutil import match_tokens

DEFAULT_DIMS = 384
NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray  # float32, unit L2 norm

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float32)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise ValueError("embedding must be a 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding has non-finite values")
        norm = float(np.linalg.norm(v.astype(np.float64)))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"embedding norm {norm} outside 1 ± {NORM_TOLERANCE}")

    @property
    def dims(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EmbeddingVector) and np.array_equal(self.values, other.values)


def unit(values: Sequence[float] | np.ndarray) -> EmbeddingVector:
    """L2-normalize arbitrary values into an EmbeddingVector."""
    v = np.asarray(values, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return EmbeddingVector((v / norm).astype(np.float32))


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Dot product of two unit-norm vectors, clamped to [-1, 1]."""
    if a.dims != b.dims:
        raise DimensionMismatch(f"dims {a.dims} != {b.dims}")
    s = float(np.dot(a.values.astype(np.float64), b.values.astype(np.float64)))
    return max(-1.0, min(1.0, s))


class EmbeddingProvider(ABC):
    name: str
    dims: int

    @abstractmethod
    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]


def embed(provider: EmbeddingProvider, text: str) -> EmbeddingVector:
    """Embed one text; rejects blank input."""
    if not text.strip():
        raise EmptyInput("cannot embed empty text")
    return provider.embed(text)


def _gram_hash(gram: str) -> int:
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class HashingProvider(EmbeddingProvider):
    """Deterministic model-free embedder.

    Per word: every character n-gram with 3 ≤ n ≤ 5 (the whole word when it
    is shorter); gram counts are a bag over the text, so word order never
    matters. Each gram lands on ``hash % dims`` with sign taken from the
    hash's top bit; the accumulated vector is L2-normalized.
    """

    def __init__(self, dims: int = DEFAULT_DIMS):
        self.name = f"fallback-hash-{dims}"
        self.dims = dims

    def _grams(self, text: str) -> Counter[str]:
        grams: Counter[str] = Counter()
        for word in match_tokens(text):
            if len(word) < 3:
                grams[word] += 1
                continue
            for n in (3, 4, 5):
                for i in range(len(word) - n + 1):
                    grams[word[i : i + n]] += 1
        return grams

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        out = []
        for text in texts:
            grams = self._grams(text)
            if not grams:
                # Punctuation-only input still gets a stable direction.
                grams = Counter({text.strip() or "∅": 1})
            acc = np.zeros(self.dims, dtype=np.float64)
            for gram, count in grams.items():
                h = _gram_hash(gram)
                sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
                acc[h % self.dims] += sign * count
            out.append(unit(acc))
        return out


class RemoteProvider(EmbeddingProvider):
    """JSON-over-HTTP embedding client.

    Request ``{"texts": [...]}``; response ``{"vectors": [[...], ...]}``.
    Returned vectors are re-normalized locally so the unit-norm invariant
    holds regardless of the server.
    """

    def __init__(self, url: str, dims: int = DEFAULT_DIMS, timeout: float = 10.0):
        self.name = f"remote({url})"
        self.url = url
        self.dims = dims
        self.timeout = timeout

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        try:
            resp = requests.post(self.url, json={"texts": list(texts)}, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"embedding server unreachable: {exc}") from exc
        if resp.status_code != 200:
            retry_after = float(resp.headers.get("Retry-After", 1.0))
            raise ProviderUnavailable(
                f"embedding server returned {resp.status_code}", retry_after=retry_after
            )
        try:
            vectors = resp.json()["vectors"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise ProviderUnavailable(f"malformed embedding response: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderUnavailable("embedding response count mismatch")
        out = []
        for v in vectors:
            if len(v) != self.dims:
                raise DimensionMismatch(f"server returned {len(v)} dims, expected {self.dims}")
            out.append(unit(v))
        return out


def make_provider(spec: str, dims: int = DEFAULT_DIMS) -> EmbeddingProvider:
    """Build a provider from a config string: ``fallback`` or ``remote(url)``."""
    spec = spec.strip()
    if spec == "fallback":
        return HashingProvider(dims=dims)
    if spec.startswith("remote(") and spec.endswith(")"):
        return RemoteProvider(spec[len("remote(") : -1], dims=dims)
    raise ValueError(f"unknown embedding provider spec {spec!r}")
