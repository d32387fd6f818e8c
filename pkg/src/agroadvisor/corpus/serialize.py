"""Chunk and manifest serialization.

Chunks round-trip exactly through two formats: Markdown files with a
``---``-delimited frontmatter block (one chunk per file) and a JSONL
stream. The corpus manifest is a JSON array of source-document records;
``raw_text_file`` may replace ``raw_text`` with a path relative to the
manifest.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from ..errors import ParseError
from .segment import SOURCE_KINDS, Chunk, SourceDocument

_FIELDS = (
    ("chunk_id", str),
    ("doc_id", str),
    ("ordinal", int),
    ("token_count", int),
    ("topic", str),
    ("structural_position", float),
    ("source_kind", str),
)


def to_markdown(chunk: Chunk) -> str:
    lines = ["---"]
    for name, kind in _FIELDS:
        value = getattr(chunk, name)
        lines.append(f"{name}: {value!r}" if kind is float else f"{name}: {value}")
    lines.append("---")
    return "\n".join(lines) + "\n" + chunk.text + "\n"


def from_markdown(s: str) -> Chunk:
    lines = s.split("\n")
    if not lines or lines[0] != "---":
        raise ParseError("expected frontmatter opener '---'", line=1)
    fields: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines[1:], start=2):
        if line == "---":
            body_start = i
            break
        if ": " not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", line=i)
        key, value = line.split(": ", 1)
        if key in fields:
            raise ParseError(f"duplicate field {key!r}", line=i)
        fields[key] = value
    if body_start is None:
        raise ParseError("unterminated frontmatter", line=len(lines))

    kwargs: dict = {}
    for name, kind in _FIELDS:
        if name not in fields:
            raise ParseError(f"missing required field {name!r}", line=body_start)
        raw = fields[name]
        try:
            kwargs[name] = kind(raw)
        except ValueError as exc:
            raise ParseError(f"field {name!r}: {exc}", line=body_start) from exc
    text = "\n".join(lines[body_start:])
    if not text.endswith("\n"):
        raise ParseError("body must end with a newline", line=len(lines))
    kwargs["text"] = text[:-1]
    return Chunk(**kwargs)


def chunk_to_dict(chunk: Chunk) -> dict:
    return {
        "chunk_id": chunk.chunk_id,
        "doc_id": chunk.doc_id,
        "ordinal": chunk.ordinal,
        "text": chunk.text,
        "token_count": chunk.token_count,
        "topic": chunk.topic,
        "structural_position": chunk.structural_position,
        "source_kind": chunk.source_kind,
    }


def chunk_from_dict(row: dict, line: int | None = None) -> Chunk:
    try:
        return Chunk(
            chunk_id=row["chunk_id"],
            doc_id=row["doc_id"],
            ordinal=int(row["ordinal"]),
            text=row["text"],
            token_count=int(row["token_count"]),
            topic=row["topic"],
            structural_position=float(row["structural_position"]),
            source_kind=row["source_kind"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad chunk record: {exc}", line=line) from exc


def write_chunks_jsonl(chunks: Iterable[Chunk], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for chunk in chunks:
            fh.write(json.dumps(chunk_to_dict(chunk), ensure_ascii=False) + "\n")


def read_chunks_jsonl(path: str | Path) -> list[Chunk]:
    chunks = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=i) from exc
            chunks.append(chunk_from_dict(row, line=i))
    return chunks


def write_chunk_files(chunks: Iterable[Chunk], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for chunk in chunks:
        path = out / f"{chunk.chunk_id}.md"
        path.write_text(to_markdown(chunk), encoding="utf-8")
        paths.append(path)
    return paths


def read_chunks(path: str | Path) -> list[Chunk]:
    """Read chunks from a JSONL file or a directory of .md chunk files."""
    path = Path(path)
    if path.is_dir():
        chunks = [from_markdown(p.read_text(encoding="utf-8")) for p in sorted(path.glob("*.md"))]
        if not chunks:
            raise ParseError(f"no chunk .md files under {path}")
        return chunks
    return read_chunks_jsonl(path)


def load_manifest(path: str | Path) -> list[SourceDocument]:
    """Load the corpus manifest (JSON array of source-document records)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest is not valid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, list):
        raise ParseError("manifest must be a JSON array of documents")

    docs: list[SourceDocument] = []
    seen: set[str] = set()
    for i, row in enumerate(data):
        if not isinstance(row, dict):
            raise ParseError(f"manifest entry {i} is not an object")
        raw_text = row.get("raw_text")
        if raw_text is None and "raw_text_file" in row:
            ref = path.parent / row["raw_text_file"]
            if not ref.is_file():
                raise ParseError(f"manifest entry {i}: raw_text_file {ref} not found")
            raw_text = ref.read_text(encoding="utf-8")
        if not raw_text:
            raise ParseError(f"manifest entry {i}: needs raw_text or raw_text_file")
        try:
            doc = SourceDocument(
                doc_id=row.get("doc_id", ""),
                title=row.get("title", ""),
                source_kind=row.get("source_kind", "other"),
                language=row.get("language", "bn"),
                raw_text=raw_text,
                provenance=row.get("provenance", ""),
            )
        except ValueError as exc:
            raise ParseError(f"manifest entry {i}: {exc}") from exc
        if doc.doc_id in seen:
            raise ParseError(f"manifest entry {i}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


__all__ = [
    "SOURCE_KINDS",
    "chunk_from_dict",
    "chunk_to_dict",
    "from_markdown",
    "load_manifest",
    "read_chunks",
    "read_chunks_jsonl",
    "to_markdown",
    "write_chunk_files",
    "write_chunks_jsonl",
]
