"""Prompt assembly from retrieval evidence.

Context blocks are rendered in retrieval rank order as numbered, id-tagged
sections. When the budget is tight, blocks are dropped from the tail
(lowest fused rank first); block numbering stays contiguous because only a
prefix ever survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ContextBudgetExhausted
from ..rerank import RetrievalResult
from ..textutil import count_tokens

_DATA = Path(__file__).resolve().parent.parent / "data"

BLOCK_HEADER = "[প্রসঙ্গ {rank}: {chunk_id}]"


@dataclass(frozen=True)
class PromptLimits:
    context_window_tokens: int = 4096
    max_output_tokens: int = 512


@dataclass(frozen=True)
class PromptBundle:
    system_instructions: str
    context_blocks: list[tuple[str, str]]  # (chunk_id, text), rank order
    user_question: str
    dialogue_history: list[dict] = field(default_factory=list)

    def rendered_context(self) -> str:
        return "\n\n".join(
            _render_block(i + 1, cid, text) for i, (cid, text) in enumerate(self.context_blocks)
        )

    def to_messages(self) -> list[dict]:
        return [
            {"role": "system", "content": self.system_instructions},
            {"role": "user", "content": _user_template().format(
                history=_render_history(self.dialogue_history),
                context=self.rendered_context(),
                question=self.user_question,
            )},
        ]


def _render_block(rank: int, chunk_id: str, text: str) -> str:
    return BLOCK_HEADER.format(rank=rank, chunk_id=chunk_id) + "\n" + text


def _render_history(history: list[dict]) -> str:
    if not history:
        return ""
    labels = {"user": "ব্যবহারকারী", "assistant": "সহকারী"}
    lines = [f"{labels.get(turn['role'], turn['role'])}: {turn['text']}" for turn in history]
    return "পূর্বের কথোপকথন:\n" + "\n".join(lines) + "\n\n"


def system_instructions() -> str:
    return (_DATA / "system_instructions.txt").read_text(encoding="utf-8").strip()


def _user_template() -> str:
    return (_DATA / "user_template.txt").read_text(encoding="utf-8")


def build_prompt(
    question: str,
    retrieval: RetrievalResult,
    history: list[dict] | None = None,
    limits: PromptLimits = PromptLimits(),
) -> PromptBundle:
    """Fit the ranked evidence into the token budget, dropping tail blocks."""
    if not retrieval.items:
        raise ValueError("retrieval produced no items")
    history = history or []
    system = system_instructions()
    scaffold = _user_template().format(
        history=_render_history(history), context="", question=question
    )
    budget = (
        limits.context_window_tokens
        - limits.max_output_tokens
        - count_tokens(system)
        - count_tokens(scaffold)
    )
    blocks = [(item.chunk_id, item.text) for item in retrieval.items]
    costs = [
        count_tokens(_render_block(i + 1, cid, text)) for i, (cid, text) in enumerate(blocks)
    ]
    kept = len(blocks)
    while kept > 0 and sum(costs[:kept]) > budget:
        kept -= 1
    if kept == 0:
        raise ContextBudgetExhausted(
            f"top block needs {costs[0]} tokens, budget is {budget}"
        )
    return PromptBundle(
        system_instructions=system,
        context_blocks=blocks[:kept],
        user_question=question,
        dialogue_history=list(history),
    )
