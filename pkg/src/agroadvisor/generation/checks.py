"""Answer post-checks: grounding, coherence, voice formatting."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from ..textutil import (
    CLAUSE_SEPARATORS,
    SENTENCE_FINAL,
    count_tokens,
    match_tokens,
    split_sentences,
)

SUPPORT_THRESHOLD = 0.2
DISCLAIMER_TRIP_FRACTION = 0.4
VOICE_MAX_SENTENCE_TOKENS = 30

DISCLAIMER = (
    "সতর্কতা: প্রদত্ত তথ্যসূত্রে এ বিষয়ে যথেষ্ট নির্ভরযোগ্য তথ্য নেই; "
    "স্থানীয় কৃষি সম্প্রসারণ কর্মকর্তার সঙ্গে যোগাযোগ করুন।"
)

# Function words carry no grounding signal; everything else is a content word.
STOPWORDS = frozenset(
    """
    এবং ও আর বা কিন্তু যে যা এই সেই একটি একটা হয় হয়ে হবে হলে হল করে করা করতে করুন
    থেকে জন্য সাথে সঙ্গে মধ্যে উপর পরে আগে যদি তবে তাহলে তা কি কী না নেই আছে ছিল
    দিয়ে দিতে দিন নিন এর এ তার তাদের আপনার আমার এটি এটা সব খুব আরও অনেক
    the a an is are was were be been of to in on for and or if with by at it its
    this that these those as from into over under then than so such not no
    """.split()
)


@dataclass(frozen=True)
class SentenceGrounding:
    sentence: str
    support: float
    flagged: bool
    best_block: str | None  # chunk_id of the argmax-support block


def content_words(text: str) -> set[str]:
    return {t for t in match_tokens(text) if t not in STOPWORDS}


def grounding_check(
    answer: str,
    context_blocks: list[tuple[str, str]],
    threshold: float = SUPPORT_THRESHOLD,
) -> list[SentenceGrounding]:
    """Per-sentence support: the best block's share of the sentence's
    content words. Sentences with no content words are vacuously supported.
    """
    block_words = [(cid, content_words(text)) for cid, text in context_blocks]
    report = []
    for sentence in split_sentences(answer):
        words = content_words(sentence)
        if not words:
            report.append(SentenceGrounding(sentence, 1.0, False, None))
            continue
        best, best_cid = 0.0, None
        for cid, bw in block_words:
            support = len(words & bw) / len(words)
            if support > best:
                best, best_cid = support, cid
        report.append(SentenceGrounding(sentence, best, best < threshold, best_cid))
    return report


def flagged_fraction(report: list[SentenceGrounding]) -> float:
    if not report:
        return 0.0
    return sum(1 for s in report if s.flagged) / len(report)


def is_coherent(answer: str, max_ngram_repeats: int = 2, n: int = 12) -> bool:
    """Nonempty and no token 12-gram repeated more than twice."""
    tokens = match_tokens(answer)
    if not answer.strip():
        return False
    seen: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i : i + n])
        seen[gram] = seen.get(gram, 0) + 1
        if seen[gram] > max_ngram_repeats:
            return False
    return True


_LINK = re.compile(r"!?\[([^\]]*)\]\([^)]*\)")
_HEADING_MARK = re.compile(r"^#{1,6}\s+")
_BULLET = re.compile(r"^(?:[-*•]|\(?[0-9০-৯]{1,3}[.)])\s+")
_BLOCKQUOTE = re.compile(r"^>\s*")
_ALLOWED_PUNCT = set(SENTENCE_FINAL) | set(CLAUSE_SEPARATORS) | {":"}


def _keep_char(ch: str) -> bool:
    if ch.isspace() or ch in _ALLOWED_PUNCT:
        return True
    return unicodedata.category(ch)[0] in "LMN"


def _split_long(sentence: str) -> list[str]:
    """Recursively split an overlong sentence at the clause separator that
    best balances the halves, promoting it to a sentence-final danda."""
    if count_tokens(sentence) <= VOICE_MAX_SENTENCE_TOKENS:
        return [sentence]
    positions = [i for i, ch in enumerate(sentence) if ch in CLAUSE_SEPARATORS]
    if not positions:
        return [sentence]
    target = len(sentence) / 2
    cut = min(positions, key=lambda i: abs(i - target))
    left = sentence[:cut].rstrip() + "।"
    right = sentence[cut + 1 :].strip()
    out = _split_long(left)
    if right:
        out.extend(_split_long(right))
    return out


def format_for_voice(answer: str) -> str:
    """Markdown → plain speakable text. Idempotent.

    List items become plain sentences, links keep their captions, every
    character outside letters/digits/marks and sentence punctuation is
    dropped, and sentences over the token cap are split at clause
    punctuation.
    """
    lines = []
    for line in answer.split("\n"):
        line = _LINK.sub(lambda m: m.group(1), line)
        line = _HEADING_MARK.sub("", line)
        line = _BLOCKQUOTE.sub("", line)
        was_item = bool(_BULLET.match(line))
        line = _BULLET.sub("", line)
        line = line.strip()
        if not line:
            continue
        if was_item and line[-1] not in SENTENCE_FINAL:
            line += "।"
        lines.append(line)
    text = " ".join(lines)
    text = "".join(ch if _keep_char(ch) else " " for ch in text)
    text = re.sub(r"\s+", " ", text).strip()
    pieces = []
    for sentence in split_sentences(text):
        pieces.extend(_split_long(sentence))
    return " ".join(pieces)
