"""Document pipeline: normalize, correct, segment, serialize.

Raw extracted text goes in; metadata-tagged chunks in the 150..300 token
band come out, serialized as Markdown-with-frontmatter or JSONL.
"""

from .normalize import CorrectionRule, apply_corrections, load_rules, normalize_text
from .segment import Chunk, ChunkingConfig, SourceDocument, segment
from .serialize import (
    chunk_from_dict,
    chunk_to_dict,
    from_markdown,
    load_manifest,
    read_chunks,
    read_chunks_jsonl,
    to_markdown,
    write_chunk_files,
    write_chunks_jsonl,
)

__all__ = [
    "Chunk",
    "ChunkingConfig",
    "CorrectionRule",
    "SourceDocument",
    "apply_corrections",
    "chunk_from_dict",
    "chunk_to_dict",
    "from_markdown",
    "load_manifest",
    "load_rules",
    "normalize_text",
    "read_chunks",
    "read_chunks_jsonl",
    "segment",
    "to_markdown",
    "write_chunk_files",
    "write_chunks_jsonl",
]
