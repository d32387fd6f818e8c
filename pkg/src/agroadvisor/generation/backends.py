"""Chat-completion backends.

Wire contract (the de-facto chat convention, schema in schemas/):
request ``{model, messages:[{role,content}], temperature, top_p,
max_tokens, seed?}`` → response ``{choices:[{message:{content}}]}``.
``serialize_request`` is the canonical byte encoding used both on the wire
and in golden-file tests.
"""

from __future__ import annotations

import json
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass

import requests

from ..errors import BackendRefusal, BackendUnavailable, TimeoutExceeded
from ..textutil import split_sentences


@dataclass(frozen=True)
class SamplingConfig:
    temperature: float = 0.2
    top_p: float = 0.9
    max_output_tokens: int = 512
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")


def serialize_request(model: str, messages: list[dict], sampling: SamplingConfig) -> bytes:
    payload: dict = {
        "model": model,
        "messages": messages,
        "temperature": sampling.temperature,
        "top_p": sampling.top_p,
        "max_tokens": sampling.max_output_tokens,
    }
    if sampling.seed is not None:
        payload["seed"] = sampling.seed
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


class ChatBackend(ABC):
    name: str
    model: str

    @abstractmethod
    def complete(self, messages: list[dict], sampling: SamplingConfig) -> str: ...


def generate(backend: ChatBackend, bundle, sampling: SamplingConfig) -> str:
    """Run one completion for a prompt bundle; returns the raw answer."""
    return backend.complete(bundle.to_messages(), sampling)


_FIRST_BLOCK = re.compile(
    r"\[প্রসঙ্গ 1: (?P<chunk_id>[^\]]+)\]\n(?P<text>.*?)(?=\n\n\[প্রসঙ্গ \d|\n\nপ্রশ্ন:|\Z)",
    re.DOTALL,
)


class StubChatBackend(ChatBackend):
    """Offline deterministic backend: echoes the top context block.

    Answers with the first three sentences of the highest-ranked block, so
    downstream grounding sees fully supported text. Identical messages and
    seed always produce identical output.
    """

    INSUFFICIENT = "প্রদত্ত প্রসঙ্গে এ প্রশ্নের যথেষ্ট তথ্য নেই।"

    def __init__(self, model: str = "stub-echo"):
        self.name = "stub"
        self.model = model

    def complete(self, messages: list[dict], sampling: SamplingConfig) -> str:
        user = next((m["content"] for m in reversed(messages) if m["role"] == "user"), "")
        m = _FIRST_BLOCK.search(user)
        if not m:
            return self.INSUFFICIENT
        sentences = split_sentences(m.group("text"))[:3]
        if not sentences:
            return self.INSUFFICIENT
        return " ".join(sentences)


class HttpChatBackend(ChatBackend):
    def __init__(self, endpoint: str, model: str, timeout: float = 60.0):
        self.name = "http"
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout

    def complete(self, messages: list[dict], sampling: SamplingConfig) -> str:
        body = serialize_request(self.model, messages, sampling)
        try:
            resp = requests.post(
                self.endpoint,
                data=body,
                headers={"Content-Type": "application/json"},
                timeout=self.timeout,
            )
        except requests.Timeout as exc:
            raise TimeoutExceeded(f"backend timed out after {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise BackendUnavailable(f"backend unreachable: {exc}") from exc
        if resp.status_code != 200:
            if resp.status_code in (502, 503, 504, 429):
                retry_after = float(resp.headers.get("Retry-After", 1.0))
                raise BackendUnavailable(
                    f"backend returned {resp.status_code}", retry_after=retry_after
                )
            raise BackendRefusal(
                f"backend returned {resp.status_code}: {resp.text[:200]}",
                status_code=resp.status_code,
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, LookupError, TypeError) as exc:
            raise BackendRefusal(f"malformed backend response: {exc}") from exc


def make_backend(kind: str, endpoint: str = "", model: str = "", timeout: float = 60.0) -> ChatBackend:
    if kind == "stub":
        return StubChatBackend(model=model or "stub-echo")
    if kind == "http":
        if not endpoint:
            raise ValueError("http backend needs an endpoint")
        return HttpChatBackend(endpoint, model or "default", timeout=timeout)
    raise ValueError(f"unknown backend kind {kind!r}")
