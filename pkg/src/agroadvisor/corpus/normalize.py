"""Text normalization and rule-based OCR post-correction.

``normalize_text`` is a total, idempotent function: NFC composition,
control/format stripping, joiner filtering, whitespace collapse, and
line-break hyphenation rejoin. Correction rules are data (pattern,
replacement, optional context guard), shipped as an editable JSON file so
the vocabulary of scanner errors can grow without code changes.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from ..errors import InvalidRule
from ..textutil import ZERO_WIDTH_JOINERS

# Guard regexes are matched against the replacement site plus this many
# characters of context on each side.
GUARD_WINDOW = 20

_WS_RUN = re.compile(r"\s+")
_HYPHEN_BREAK = re.compile(r"-\n")


@lru_cache(maxsize=4096)
def _script(ch: str) -> str:
    """First word of the Unicode character name ("BENGALI", "LATIN", ...)."""
    try:
        return unicodedata.name(ch).split(" ", 1)[0]
    except ValueError:
        return ""


def _keep_joiner(text: str, i: int) -> bool:
    """A ZWJ/ZWNJ survives only between letters of the same script.

    The preceding base is the last letter before any run of marks/joiners
    (Bengali conjunct controls legitimately follow a virama mark).
    """
    j = i - 1
    while j >= 0 and (unicodedata.category(text[j]).startswith("M") or text[j] in ZERO_WIDTH_JOINERS):
        j -= 1
    if j < 0 or not unicodedata.category(text[j]).startswith("L"):
        return False
    k = i + 1
    while k < len(text) and text[k] in ZERO_WIDTH_JOINERS:
        k += 1
    if k >= len(text) or not unicodedata.category(text[k]).startswith("L"):
        return False
    return _script(text[j]) == _script(text[k]) != ""


def _strip_controls(text: str) -> str:
    out: list[str] = []
    for i, ch in enumerate(text):
        cat = unicodedata.category(ch)
        if ch == "\n":
            out.append(ch)
        elif ch in ZERO_WIDTH_JOINERS:
            if _keep_joiner(text, i):
                out.append(ch)
        elif cat in ("Cc", "Cf"):
            continue
        else:
            out.append(ch)
    return "".join(out)


def _collapse_whitespace(text: str) -> str:
    # A run containing a newline keeps exactly one; line structure feeds
    # heading detection downstream.
    return _WS_RUN.sub(lambda m: "\n" if "\n" in m.group(0) else " ", text).strip()


def _rejoin_hyphenation(text: str) -> str:
    def repl(m: re.Match[str]) -> str:
        before = m.string[m.start() - 1] if m.start() > 0 else ""
        after = m.string[m.end()] if m.end() < len(m.string) else ""
        if (
            before
            and after
            and unicodedata.category(before)[0] in "LM"
            and unicodedata.category(after).startswith("L")
        ):
            return ""
        return m.group(0)

    return _HYPHEN_BREAK.sub(repl, text)


def normalize_text(raw: str) -> str:
    """Normalize extracted document text. Total and idempotent.

    Canonical composition, CRLF/CR to LF, control and format characters
    dropped (newline kept, joiners kept only inside same-script words),
    whitespace runs collapsed (single space, or single newline when the run
    crossed lines), and end-of-line hyphenation rejoined.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n")
    text = unicodedata.normalize("NFC", text)
    text = _strip_controls(text)
    text = _collapse_whitespace(text)
    text = _rejoin_hyphenation(text)
    # Stripping can expose new composition pairs; recompose so a second
    # pass is a no-op.
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class CorrectionRule:
    """One scanner-error correction: regex pattern, replacement, optional
    guard that must match within GUARD_WINDOW characters of the site."""

    pattern: str
    replacement: str
    context_guard: str | None = None

    def compiled(self) -> tuple[re.Pattern[str], re.Pattern[str] | None]:
        if not self.pattern:
            raise InvalidRule("empty pattern")
        try:
            pat = re.compile(self.pattern)
        except re.error as exc:
            raise InvalidRule(f"pattern {self.pattern!r}: {exc}") from exc
        guard = None
        if self.context_guard:
            try:
                guard = re.compile(self.context_guard)
            except re.error as exc:
                raise InvalidRule(f"guard {self.context_guard!r}: {exc}") from exc
        return pat, guard


def apply_corrections(text: str, rules: list[CorrectionRule]) -> tuple[str, int]:
    """Apply rules in list order, leftmost-first within each rule.

    Returns the corrected text and the total replacement count. Guarded
    sites that fail their guard are left untouched and later matches still
    run. Output is stable under a second pass as long as each rule is
    idempotent on its own output (a data-file obligation).
    """
    total = 0
    for rule in rules:
        pat, guard = rule.compiled()
        pieces: list[str] = []
        pos = 0
        for m in pat.finditer(text):
            if guard is not None:
                lo = max(0, m.start() - GUARD_WINDOW)
                hi = min(len(text), m.end() + GUARD_WINDOW)
                if not guard.search(text[lo:hi]):
                    continue
            pieces.append(text[pos : m.start()])
            pieces.append(m.expand(rule.replacement))
            pos = m.end()
            total += 1
        pieces.append(text[pos:])
        text = "".join(pieces)
    return text, total


def load_rules(path: str | Path) -> list[CorrectionRule]:
    """Load and validate a JSON rule file (array of rule objects)."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise InvalidRule(f"{path}: expected a JSON array of rules")
    rules = []
    for i, row in enumerate(data):
        if not isinstance(row, dict) or "pattern" not in row or "replacement" not in row:
            raise InvalidRule(f"{path}: rule {i} needs pattern and replacement")
        rule = CorrectionRule(
            pattern=row["pattern"],
            replacement=row["replacement"],
            context_guard=row.get("context_guard"),
        )
        rule.compiled()
        rules.append(rule)
    return rules


def default_rules_path() -> Path:
    return Path(__file__).resolve().parent.parent / "data" / "correction_rules.json"
