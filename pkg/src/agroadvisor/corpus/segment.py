"""Greedy segmentation of normalized documents into token-bounded chunks.

Units are sentences (danda/period/question/exclamation boundaries) and
heading lines; a chunk is a contiguous span of units. Packing never splits
inside a sentence unless the sentence alone exceeds the upper bound, in
which case it is divided at word boundaries. Heading lines open a new chunk
and set the topic path. Undersized fragments closed by a heading or by the
end of the document are merged into their predecessor, which is the only
way a chunk may exceed the upper bound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import EmptyDocument
from ..textutil import SENTENCE_FINAL, count_tokens, token_spans

SOURCE_KINDS = ("handbook", "manual", "textbook", "bulletin", "regional", "other")

_HEADING = re.compile(r"^(#{1,6})\s+(.*\S)\s*$")
_LANGUAGE_TAG = re.compile(r"^[A-Za-z]{2,8}(-[A-Za-z0-9]{1,8})*$")


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    title: str
    source_kind: str
    language: str
    raw_text: str
    provenance: str = ""

    def __post_init__(self) -> None:
        if not self.doc_id or not re.fullmatch(r"[a-z0-9][a-z0-9_-]*", self.doc_id):
            raise ValueError(f"doc_id must be a nonempty slug, got {self.doc_id!r}")
        if self.source_kind not in SOURCE_KINDS:
            raise ValueError(f"source_kind must be one of {SOURCE_KINDS}")
        if not _LANGUAGE_TAG.fullmatch(self.language):
            raise ValueError(f"language must be a BCP-47 tag, got {self.language!r}")
        if not self.raw_text:
            raise ValueError("raw_text must be nonempty")


@dataclass(frozen=True)
class ChunkingConfig:
    min_tokens: int = 150
    max_tokens: int = 300
    min_terminal_tokens: int = 50

    def __post_init__(self) -> None:
        if not (0 < self.min_terminal_tokens <= self.min_tokens < self.max_tokens):
            raise ValueError(
                "need 0 < min_terminal_tokens <= min_tokens < max_tokens, got "
                f"{self.min_terminal_tokens}/{self.min_tokens}/{self.max_tokens}"
            )


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    ordinal: int
    text: str
    token_count: int
    topic: str
    structural_position: float
    source_kind: str


@dataclass
class _Unit:
    start: int
    end: int
    tokens: int
    heading_level: int = 0  # 0 = sentence unit
    heading_title: str = ""


def _sentence_units(text: str, line_start: int, line_end: int, max_tokens: int) -> list[_Unit]:
    """Sentence units of one line, oversized sentences split at word bounds."""
    units: list[_Unit] = []
    line = text[line_start:line_end]
    pos = 0
    boundaries = [m.end() for m in re.finditer(rf"[{SENTENCE_FINAL}]+(?=\s|$)", line)]
    if not boundaries or boundaries[-1] < len(line):
        boundaries.append(len(line))
    for end in boundaries:
        raw = line[pos:end]
        lead = len(raw) - len(raw.lstrip())
        trail = len(raw) - len(raw.rstrip())
        s_start, s_end = pos + lead, end - trail
        if s_end > s_start:
            units.extend(_split_oversized(text, line_start + s_start, line_start + s_end, max_tokens))
        pos = end
    return units


def _split_oversized(text: str, start: int, end: int, max_tokens: int) -> list[_Unit]:
    local = text[start:end]
    spans = token_spans(local)
    if len(spans) <= max_tokens:
        return [_Unit(start, end, len(spans))]
    # Cut at the start of each group's first token so the punctuation after
    # a group stays covered by the earlier piece.
    cuts = [0] + [spans[i][0] for i in range(max_tokens, len(spans), max_tokens)] + [len(local)]
    units = []
    for g, (a, b) in enumerate(zip(cuts, cuts[1:])):
        piece = local[a:b]
        trail = len(piece) - len(piece.rstrip())
        n = min(max_tokens, len(spans) - g * max_tokens)
        units.append(_Unit(start + a, start + b - trail, n))
    return units


@dataclass
class _Builder:
    doc: SourceDocument
    cfg: ChunkingConfig
    text: str
    chunks: list[dict] = field(default_factory=list)
    units: list[_Unit] = field(default_factory=list)
    tokens: int = 0
    topic_stack: list[tuple[int, str]] = field(default_factory=list)
    topic: str = ""

    def push_heading(self, unit: _Unit) -> None:
        # Close a content-bearing chunk first; consecutive headings pile
        # into the same (new) chunk.
        if any(u.heading_level == 0 for u in self.units):
            self.close(merge_undersized=True)
        while self.topic_stack and self.topic_stack[-1][0] >= unit.heading_level:
            self.topic_stack.pop()
        self.topic_stack.append((unit.heading_level, unit.heading_title))
        self.topic = " > ".join(title for _, title in self.topic_stack)
        self.units.append(unit)
        self.tokens += unit.tokens

    def push_sentence(self, unit: _Unit) -> None:
        if self.tokens + unit.tokens > self.cfg.max_tokens and self.units:
            self.close(merge_undersized=True)
        self.units.append(unit)
        self.tokens += unit.tokens

    def close(self, merge_undersized: bool) -> None:
        if not self.units:
            return
        start, end = self.units[0].start, self.units[-1].end
        entry = {
            "start": start,
            "end": end,
            "tokens": self.tokens,
            "topic": self.topic,
        }
        threshold = self.cfg.min_tokens if merge_undersized else self.cfg.min_terminal_tokens
        if self.tokens < threshold and self.chunks:
            prev = self.chunks[-1]
            prev["end"] = end
            prev["tokens"] += self.tokens
        else:
            self.chunks.append(entry)
        self.units = []
        self.tokens = 0


def segment(doc: SourceDocument, cfg: ChunkingConfig = ChunkingConfig()) -> list[Chunk]:
    """Chunk a normalized document.

    Every chunk's token_count lies in [min_tokens, max_tokens] except the
    document-terminal chunk (allowed down to min_terminal_tokens) and
    merge-absorbing predecessors (allowed above max_tokens). Concatenating
    chunk texts in ordinal order, joined by single separators, reproduces
    the normalized document text.
    """
    text = doc.raw_text
    if count_tokens(text) == 0:
        raise EmptyDocument(f"document {doc.doc_id} has no tokens")

    builder = _Builder(doc=doc, cfg=cfg, text=text)
    offset = 0
    for line in text.split("\n"):
        line_start, line_end = offset, offset + len(line)
        offset = line_end + 1
        m = _HEADING.match(line)
        if m:
            unit = _Unit(
                start=line_start,
                end=line_end,
                tokens=count_tokens(line),
                heading_level=len(m.group(1)),
                heading_title=m.group(2),
            )
            builder.push_heading(unit)
            continue
        for unit in _sentence_units(text, line_start, line_end, cfg.max_tokens):
            builder.push_sentence(unit)
    # Document-terminal close uses the literal terminal-merge rule.
    builder.close(merge_undersized=False)

    total = len(builder.chunks)
    chunks = []
    for i, entry in enumerate(builder.chunks):
        chunks.append(
            Chunk(
                chunk_id=f"{doc.doc_id}-{i:04d}",
                doc_id=doc.doc_id,
                ordinal=i,
                text=text[entry["start"] : entry["end"]],
                token_count=entry["tokens"],
                topic=entry["topic"],
                structural_position=i / total,
                source_kind=doc.source_kind,
            )
        )
    return chunks
