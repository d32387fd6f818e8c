"""Service configuration: one YAML file, env-var overrides.

Overrides use ``AGROADVISOR_<dotted path, "." → "__", uppercased>``, e.g.
``AGROADVISOR_RETRIEVAL__K_FINAL=3`` or ``AGROADVISOR_SERVER__PORT=9000``.
An annotated example lives at config.example.yaml in the repo root.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

ENV_PREFIX = "AGROADVISOR_"


@dataclass
class EmbeddingConfig:
    provider: str = "fallback"  # fallback | remote(url)
    dims: int = 384


@dataclass
class BackendConfig:
    kind: str = "stub"  # stub | http
    endpoint: str = ""
    model: str = "stub-echo"
    timeout_s: float = 60.0


@dataclass
class RetrievalSection:
    k_candidates: int = 25
    k_final: int = 5
    w_semantic: float = 0.70
    w_lexical: float = 0.25
    w_metadata: float = 0.05
    bm25_k1: float = 1.2
    bm25_b: float = 0.75


@dataclass
class SamplingSection:
    temperature: float = 0.2
    top_p: float = 0.9
    max_output_tokens: int = 512
    seed: int | None = None


@dataclass
class PromptSection:
    context_window_tokens: int = 4096


@dataclass
class GatewaySection:
    idle_timeout_s: float = 900.0
    history_window: int = 6
    lexicon_path: str | None = None
    max_norm_dist: float = 0.2


@dataclass
class ServerSection:
    host: str = "127.0.0.1"
    port: int = 8010


@dataclass
class EvalSection:
    out_dir: str | None = None


@dataclass
class ServiceConfig:
    corpus_dir: str = "corpus"
    index_dir: str = "index"
    rules_path: str | None = None
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    retrieval: RetrievalSection = field(default_factory=RetrievalSection)
    sampling: SamplingSection = field(default_factory=SamplingSection)
    prompt: PromptSection = field(default_factory=PromptSection)
    gateway: GatewaySection = field(default_factory=GatewaySection)
    server: ServerSection = field(default_factory=ServerSection)
    eval: EvalSection = field(default_factory=EvalSection)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceConfig":
        cfg = cls()
        for section, value in data.items():
            if not hasattr(cfg, section):
                raise ValueError(f"unknown config section {section!r}")
            current = getattr(cfg, section)
            if isinstance(value, dict):
                for key, item in value.items():
                    if not hasattr(current, key):
                        raise ValueError(f"unknown config key {section}.{key}")
                    setattr(current, key, item)
            else:
                setattr(cfg, section, value)
        return cfg

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict[str, str] | None = None) -> "ServiceConfig":
        data: dict = {}
        if path is not None:
            loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
            if loaded is not None:
                data = loaded
        cfg = cls.from_dict(data)
        cfg.apply_env(env if env is not None else dict(os.environ))
        return cfg

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(
            yaml.safe_dump(self.to_dict(), allow_unicode=True, sort_keys=True),
            encoding="utf-8",
        )

    def apply_env(self, env: dict[str, str]) -> None:
        for name, raw in env.items():
            if not name.startswith(ENV_PREFIX):
                continue
            dotted = name[len(ENV_PREFIX) :].lower().split("__")
            target: Any = self
            for part in dotted[:-1]:
                if not hasattr(target, part):
                    raise ValueError(f"unknown config path in {name}")
                target = getattr(target, part)
            key = dotted[-1]
            if not hasattr(target, key):
                raise ValueError(f"unknown config key in {name}")
            setattr(target, key, _coerce(getattr(target, key), raw))


def _coerce(current: Any, raw: str) -> Any:
    if raw.lower() in ("null", "none", ""):
        return None
    if isinstance(current, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if current is None:
        # Untyped (optional) keys: best-effort numeric, else string.
        try:
            return int(raw)
        except ValueError:
            try:
                return float(raw)
            except ValueError:
                return raw
    return raw
