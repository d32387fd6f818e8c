"""Voice-webhook dialogue gateway.

The voice platform owns audio: this side receives text transcripts and
returns reply text plus a voice-ready variant. Sessions are tracked for
multi-turn coherence, noisy transcripts are repaired against a domain-term
lexicon, and near-tie retrievals across different topics trigger a
clarification question instead of an answer.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import (
    BackendRefusal,
    BackendUnavailable,
    ParseError,
    ProviderUnavailable,
    TimeoutExceeded,
)
from .rerank import RetrievalResult
from .textutil import token_spans

logger = logging.getLogger(__name__)

IDLE_TIMEOUT_S = 15 * 60
HISTORY_WINDOW = 6
MAX_NORM_DIST = 0.2
AMBIGUITY_MARGIN = 0.05

APOLOGY = "দুঃখিত, এই মুহূর্তে পরামর্শ সেবায় সমস্যা হচ্ছে; কিছুক্ষণ পরে আবার চেষ্টা করুন।"

UPSTREAM_ERRORS = (BackendRefusal, BackendUnavailable, ProviderUnavailable, TimeoutExceeded)


# -- lexicon and transcript repair -------------------------------------------


@dataclass(frozen=True)
class TermLexicon:
    entries: list[dict]  # {canonical: str, variants: [str]}

    def __post_init__(self) -> None:
        seen_canonical: set[str] = set()
        variant_owner: dict[str, str] = {}
        for entry in self.entries:
            canonical = entry["canonical"]
            if canonical in seen_canonical:
                raise ValueError(f"duplicate canonical {canonical!r}")
            seen_canonical.add(canonical)
            for variant in entry.get("variants", []):
                owner = variant_owner.get(variant)
                if owner is not None and owner != canonical:
                    raise ValueError(f"variant {variant!r} maps to two canonicals")
                variant_owner[variant] = canonical

    def surface_map(self) -> dict[str, str]:
        """Every known surface form → its canonical."""
        surfaces: dict[str, str] = {}
        for entry in self.entries:
            surfaces[entry["canonical"]] = entry["canonical"]
            for variant in entry.get("variants", []):
                surfaces.setdefault(variant, entry["canonical"])
        return surfaces

    @classmethod
    def from_file(cls, path: str | Path) -> "TermLexicon":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"lexicon is not valid JSON: {exc.msg}", line=exc.lineno) from exc
        if not isinstance(data, list):
            raise ParseError("lexicon must be a JSON array of entries")
        return cls(entries=data)


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a or not b:
        return len(a) + len(b)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def repair_transcript(
    text: str, lexicon: TermLexicon, max_norm_dist: float = MAX_NORM_DIST
) -> tuple[str, list[dict]]:
    """Snap out-of-lexicon tokens to the nearest canonical term.

    Normalized distance is levenshtein / max(len); candidates are measured
    against every surface form (canonicals and variants). Ties go to the
    lexicographically smaller canonical. A token equal to a variant is
    canonicalized outright.
    """
    surfaces = lexicon.surface_map()
    repairs: list[dict] = []
    out: list[str] = []
    pos = 0
    for start, end in token_spans(text):
        out.append(text[pos:start])
        token = text[start:end]
        replacement = token
        known = surfaces.get(token)
        if known is not None:
            replacement = known  # canonical stays itself, variants snap
        else:
            best: tuple[float, str] | None = None
            for surface, canonical in surfaces.items():
                nd = levenshtein(token, surface) / max(len(token), len(surface))
                if nd > max_norm_dist:
                    continue
                if best is None or nd < best[0] or (nd == best[0] and canonical < best[1]):
                    best = (nd, canonical)
            if best is not None:
                replacement = best[1]
        if replacement != token:
            repairs.append({"from": token, "to": replacement})
        out.append(replacement)
        pos = end
    out.append(text[pos:])
    return "".join(out), repairs


# -- ambiguity ----------------------------------------------------------------


def detect_ambiguity(question: str, retrieval: RetrievalResult) -> str | None:
    """Clarify when the two best candidates are score-tied across topics."""
    items = retrieval.items
    if len(items) < 2:
        return None
    first, second = items[0], items[1]
    if first.fused - second.fused >= AMBIGUITY_MARGIN:
        return None
    if not first.topic or not second.topic or first.topic == second.topic:
        return None
    return (
        f"আপনার প্রশ্নটি কি “{first.topic}” নাকি “{second.topic}”"
        " বিষয়ে? দয়া করে একটু স্পষ্ট করে বলুন।"
    )


# -- sessions -----------------------------------------------------------------


@dataclass
class DialogueSession:
    session_id: str
    turns: list[dict] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    last_active_at: float = field(default_factory=time.time)
    state: str = "open"  # open | awaiting_clarification | closed
    pending_question: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def append(self, role: str, text: str) -> None:
        self.turns.append({"role": role, "text": text, "timestamp": time.time()})
        self.last_active_at = time.time()

    def history_window(self, n: int = HISTORY_WINDOW) -> list[dict]:
        return [{"role": t["role"], "text": t["text"]} for t in self.turns[-n:]]

    def snapshot(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": self.state,
            "created_at": self.created_at,
            "last_active_at": self.last_active_at,
            "turns": [dict(t) for t in self.turns],
        }


class SessionStore:
    """Shared session map: per-session serial turns, cross-session parallel."""

    def __init__(self, idle_timeout_s: float = IDLE_TIMEOUT_S, clock: Callable[[], float] = time.time):
        self._sessions: dict[str, DialogueSession] = {}
        self._lock = threading.Lock()
        self.idle_timeout_s = idle_timeout_s
        self._clock = clock

    def sweep(self) -> int:
        """Close idle sessions; returns how many were closed."""
        now = self._clock()
        closed = 0
        with self._lock:
            for session in self._sessions.values():
                if session.state != "closed" and now - session.last_active_at > self.idle_timeout_s:
                    session.state = "closed"
                    closed += 1
        return closed

    def get(self, session_id: str) -> DialogueSession | None:
        with self._lock:
            return self._sessions.get(session_id)

    def get_or_create(self, session_id: str) -> DialogueSession:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None or session.state == "closed":
                # A turn for an expired session starts a fresh one.
                session = DialogueSession(session_id=session_id)
                self._sessions[session_id] = session
            return session

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


# -- turn handling --------------------------------------------------------------


class VoiceGateway:
    """Transcript-in / answer-out contract over an advisory pipeline.

    ``answer_fn(question, history)`` is supplied by the composition root and
    returns a dict with ``reply``, ``voice_reply``, ``citations``,
    ``evidence`` and ``flagged_sentences``; the gateway owns repair,
    ambiguity and session bookkeeping.
    """

    def __init__(
        self,
        answer_fn: Callable[[str, list[dict]], dict],
        retrieve_fn: Callable[[str], RetrievalResult],
        lexicon: TermLexicon | None = None,
        sessions: SessionStore | None = None,
        history_window: int = HISTORY_WINDOW,
        max_norm_dist: float = MAX_NORM_DIST,
    ):
        self.answer_fn = answer_fn
        self.retrieve_fn = retrieve_fn
        self.lexicon = lexicon if lexicon is not None else TermLexicon(entries=[])
        self.sessions = sessions if sessions is not None else SessionStore()
        self.history_window = history_window
        self.max_norm_dist = max_norm_dist

    def handle_turn(self, session_id: str, transcript: str) -> dict:
        if not transcript.strip():
            raise ValueError("transcript must be nonempty")
        self.sessions.sweep()
        session = self.sessions.get_or_create(session_id)
        with session.lock:
            return self._run_turn(session, transcript)

    def _run_turn(self, session: DialogueSession, transcript: str) -> dict:
        from .generation.checks import format_for_voice

        repaired, repairs = repair_transcript(transcript, self.lexicon, self.max_norm_dist)
        if repairs:
            logger.info("transcript repairs: %s", repairs)
        merged = False
        if session.state == "awaiting_clarification" and session.pending_question:
            question = session.pending_question + " " + repaired
            session.pending_question = None
            session.state = "open"
            merged = True
        else:
            question = repaired

        history = session.history_window(self.history_window)
        session.append("user", transcript)
        citations: list[str] = []
        evidence: list[dict] = []
        flagged: list[str] = []
        kind = "answer"
        try:
            retrieval = self.retrieve_fn(question)
            # One clarification round at most: a merged query always answers.
            clarification = None if merged else detect_ambiguity(question, retrieval)
            if clarification is not None:
                session.state = "awaiting_clarification"
                session.pending_question = question
                reply, voice = clarification, format_for_voice(clarification)
                kind = "clarification"
            else:
                answered = self.answer_fn(question, history)
                reply = answered["reply"]
                voice = answered["voice_reply"]
                citations = answered.get("citations", [])
                evidence = answered.get("evidence", [])
                flagged = answered.get("flagged_sentences", [])
        except UPSTREAM_ERRORS as exc:
            logger.error("upstream failure in session %s: %s", session.session_id, exc)
            reply, voice = APOLOGY, format_for_voice(APOLOGY)
            kind = "error"
        session.append("assistant", reply)
        return {
            "reply": reply,
            "voice_reply": voice,
            "state": session.state,
            "session_id": session.session_id,
            "kind": kind,
            "citations": citations,
            "evidence": evidence,
            "flagged_sentences": flagged,
        }
