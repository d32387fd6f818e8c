"""Unicode-aware token and sentence primitives shared by every module.

A token is a maximal run of letters, digits, or combining marks; ZWJ/ZWNJ
do not break a run (they are conjunct controls inside Bengali words) but are
stripped from the token's identity, which is also casefolded. Python's
``\\w`` excludes combining marks (category Mn/Mc), which would split Bengali
words at every vowel sign, so the mark class is generated from unicodedata.
"""

from __future__ import annotations

import re
import sys
import unicodedata
from functools import lru_cache

ZERO_WIDTH_JOINERS = "‌‍"  # ZWNJ, ZWJ

SENTENCE_FINAL = "।.?!"  # Bengali danda + Latin sentence punctuation
CLAUSE_SEPARATORS = ",;"


def _combining_mark_ranges() -> str:
    """Character-class body covering every BMP combining mark (Mn/Mc/Me)."""
    parts: list[str] = []
    start = None
    prev = None
    for cp in range(sys.maxunicode + 1):
        if unicodedata.category(chr(cp)).startswith("M"):
            if start is None:
                start = cp
            prev = cp
        elif start is not None:
            parts.append(f"\\U{start:08X}-\\U{prev:08X}")
            start = None
    if start is not None:
        parts.append(f"\\U{start:08X}-\\U{prev:08X}")
    return "".join(parts)


@lru_cache(maxsize=1)
def _token_re() -> re.Pattern[str]:
    marks = _combining_mark_ranges()
    joiners = "".join(f"\\u{ord(c):04x}" for c in ZERO_WIDTH_JOINERS)
    return re.compile(rf"(?:[^\W_]|[{marks}{joiners}])+")


def token_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) spans of every token, in order."""
    return [m.span() for m in _token_re().finditer(text)]


def tokenize(text: str) -> list[str]:
    """Raw token surfaces, joiners included, case preserved."""
    return _token_re().findall(text)


def token_key(token: str) -> str:
    """Identity used for matching/scoring: joiner-free and casefolded."""
    return token.translate({ord(c): None for c in ZERO_WIDTH_JOINERS}).casefold()


def match_tokens(text: str) -> list[str]:
    """Tokens reduced to their matching identity."""
    keys = [token_key(t) for t in tokenize(text)]
    return [k for k in keys if k]


def count_tokens(text: str) -> int:
    return len(tokenize(text))


_SENTENCE_BOUNDARY = re.compile(rf"(?<=[{SENTENCE_FINAL}])(\s+|$)")


def split_sentences(text: str) -> list[str]:
    """Split at sentence-final punctuation followed by whitespace or EOT.

    Each sentence keeps its terminal punctuation; whitespace between
    sentences is dropped. Text without a final mark forms a last sentence.
    """
    sentences = []
    pos = 0
    for m in _SENTENCE_BOUNDARY.finditer(text):
        piece = text[pos : m.start(1)].strip()
        if piece:
            sentences.append(piece)
        pos = m.end(1)
    tail = text[pos:].strip()
    if tail:
        sentences.append(tail)
    return sentences
