"""Vector index: exact cosine scan plus approximate graph search."""

from .core import (
    CHUNKS_FILE,
    DEFAULT_EF_CONSTRUCTION,
    DEFAULT_EF_SEARCH,
    DEFAULT_M,
    DEFAULT_SEED,
    META_FILE,
    VECTORS_FILE,
    VectorIndex,
    available_backends,
    default_backend,
)

__all__ = [
    "CHUNKS_FILE",
    "DEFAULT_EF_CONSTRUCTION",
    "DEFAULT_EF_SEARCH",
    "DEFAULT_M",
    "DEFAULT_SEED",
    "META_FILE",
    "VECTORS_FILE",
    "VectorIndex",
    "available_backends",
    "default_backend",
]
