"""Grounded answer generation: prompt → backend → post-checks."""

from __future__ import annotations

from dataclasses import dataclass

from .backends import (
    ChatBackend,
    HttpChatBackend,
    SamplingConfig,
    StubChatBackend,
    generate,
    make_backend,
    serialize_request,
)
from .checks import (
    DISCLAIMER,
    DISCLAIMER_TRIP_FRACTION,
    SUPPORT_THRESHOLD,
    SentenceGrounding,
    flagged_fraction,
    format_for_voice,
    grounding_check,
    is_coherent,
)
from .prompt import PromptBundle, PromptLimits, build_prompt, system_instructions


@dataclass
class GenerationResult:
    answer_text: str
    citations: list[str]
    grounding: list[SentenceGrounding]
    disclaimer_added: bool
    voice_ready_text: str
    coherent: bool = True
    raw_answer: str = ""


def _citations(bundle: PromptBundle, report: list[SentenceGrounding]) -> list[str]:
    """Blocks that best support at least one unflagged sentence, rank order."""
    supported = {s.best_block for s in report if not s.flagged and s.best_block}
    return [cid for cid, _ in bundle.context_blocks if cid in supported]


def run_generation(
    backend: ChatBackend,
    bundle: PromptBundle,
    sampling: SamplingConfig,
    threshold: float = SUPPORT_THRESHOLD,
) -> GenerationResult:
    """Generate once, then annotate: no regeneration loop — a weakly
    grounded answer gets the fixed uncertainty disclaimer appended."""
    raw = generate(backend, bundle, sampling)
    report = grounding_check(raw, bundle.context_blocks, threshold)
    disclaimer_added = flagged_fraction(report) > DISCLAIMER_TRIP_FRACTION
    answer = raw + (" " + DISCLAIMER if disclaimer_added else "")
    return GenerationResult(
        answer_text=answer,
        citations=_citations(bundle, report),
        grounding=report,
        disclaimer_added=disclaimer_added,
        voice_ready_text=format_for_voice(answer),
        coherent=is_coherent(raw),
        raw_answer=raw,
    )


__all__ = [
    "DISCLAIMER",
    "DISCLAIMER_TRIP_FRACTION",
    "SUPPORT_THRESHOLD",
    "ChatBackend",
    "GenerationResult",
    "HttpChatBackend",
    "PromptBundle",
    "PromptLimits",
    "SamplingConfig",
    "SentenceGrounding",
    "StubChatBackend",
    "build_prompt",
    "flagged_fraction",
    "format_for_voice",
    "generate",
    "grounding_check",
    "is_coherent",
    "make_backend",
    "run_generation",
    "serialize_request",
    "system_instructions",
]
