"""Composition root: wires the pipeline, index, providers, and gateway."""

from __future__ import annotations

import logging
import threading
import time
from pathlib import Path

from ..corpus import (
    Chunk,
    ChunkingConfig,
    apply_corrections,
    load_manifest,
    load_rules,
    normalize_text,
    segment,
)
from ..corpus.normalize import default_rules_path
from ..corpus.segment import SourceDocument
from ..embeddings import EmbeddingProvider, make_provider
from ..errors import AdvisorError, EmptyIndex
from ..gateway import SessionStore, TermLexicon, VoiceGateway
from ..generation import (
    PromptLimits,
    SamplingConfig,
    build_prompt,
    make_backend,
    run_generation,
)
from ..index import META_FILE, VectorIndex
from ..rerank import CorpusStats, RetrievalConfig, item_to_dict, retrieve
from .config import ServiceConfig
from .metrics import Metrics

logger = logging.getLogger(__name__)


class AdvisoryEngine:
    """Everything behind the HTTP surface and the CLI."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.metrics = Metrics()
        self.provider: EmbeddingProvider = make_provider(
            config.embedding.provider, dims=config.embedding.dims
        )
        self.backend = make_backend(
            config.backend.kind,
            endpoint=config.backend.endpoint,
            model=config.backend.model,
            timeout=config.backend.timeout_s,
        )
        self.retrieval_cfg = RetrievalConfig(**vars(config.retrieval))
        self.sampling = SamplingConfig(**vars(config.sampling))
        self.limits = PromptLimits(
            context_window_tokens=config.prompt.context_window_tokens,
            max_output_tokens=config.sampling.max_output_tokens,
        )
        lexicon = (
            TermLexicon.from_file(config.gateway.lexicon_path)
            if config.gateway.lexicon_path
            else TermLexicon(entries=[])
        )
        self.sessions = SessionStore(idle_timeout_s=config.gateway.idle_timeout_s)
        self.gateway = VoiceGateway(
            answer_fn=self._gateway_answer,
            retrieve_fn=lambda q: retrieve(
                q, self.retrieval_cfg, self.require_index(), self.provider, self.require_stats()
            ),
            lexicon=lexicon,
            sessions=self.sessions,
            history_window=config.gateway.history_window,
            max_norm_dist=config.gateway.max_norm_dist,
        )
        self._swap_lock = threading.Lock()
        self._index: VectorIndex | None = None
        self._stats: CorpusStats | None = None

    # -- corpus / index lifecycle ---------------------------------------------

    def ingest_documents(
        self,
        docs: list[SourceDocument],
        rules_path: str | Path | None = None,
        chunking: ChunkingConfig | None = None,
    ) -> list[Chunk]:
        rules = load_rules(rules_path or self.config.rules_path or default_rules_path())
        chunking = chunking or ChunkingConfig()
        chunks: list[Chunk] = []
        for doc in docs:
            text = normalize_text(doc.raw_text)
            text, n_fixes = apply_corrections(text, rules)
            if n_fixes:
                logger.info("doc=%s corrections=%d", doc.doc_id, n_fixes)
            prepared = SourceDocument(
                doc_id=doc.doc_id,
                title=doc.title,
                source_kind=doc.source_kind,
                language=doc.language,
                raw_text=text,
                provenance=doc.provenance,
            )
            chunks.extend(segment(prepared, chunking))
        return chunks

    def ingest_manifest(
        self,
        manifest_path: str | Path,
        rules_path: str | Path | None = None,
        chunking: ChunkingConfig | None = None,
    ) -> list[Chunk]:
        return self.ingest_documents(load_manifest(manifest_path), rules_path, chunking)

    def build_index(self, chunks: list[Chunk], save: bool = True) -> VectorIndex:
        """Embed and index chunks, then atomically swap the live index."""
        idx = VectorIndex(dims=self.provider.dims)
        vectors = self.provider.embed_batch([c.text for c in chunks])
        for chunk, vec in zip(chunks, vectors):
            idx.add(chunk, vec)
        if save:
            idx.save(self.config.index_dir)
        stats = CorpusStats.from_chunks(list(idx.iter_metadata()))
        with self._swap_lock:
            self._index, self._stats = idx, stats
        return idx

    def load_index(self) -> VectorIndex:
        idx = VectorIndex.load(self.config.index_dir)
        stats = CorpusStats.from_chunks(list(idx.iter_metadata()))
        with self._swap_lock:
            self._index, self._stats = idx, stats
        return idx

    def ensure_index(self) -> VectorIndex | None:
        with self._swap_lock:
            if self._index is not None:
                return self._index
        if (Path(self.config.index_dir) / META_FILE).is_file():
            return self.load_index()
        return None

    def require_index(self) -> VectorIndex:
        idx = self.ensure_index()
        if idx is None:
            raise EmptyIndex(f"no index at {self.config.index_dir}; ingest first")
        return idx

    def require_stats(self) -> CorpusStats:
        self.require_index()
        with self._swap_lock:
            assert self._stats is not None
            return self._stats

    # -- query paths -------------------------------------------------------------

    def query(self, question: str, k: int | None = None) -> dict:
        cfg = self.retrieval_cfg
        if k is not None:
            cfg = RetrievalConfig(**{**vars(self.config.retrieval), "k_final": k})
        retrieval = retrieve(question, cfg, self.require_index(), self.provider, self.require_stats())
        t0 = time.perf_counter()
        result = run_generation(
            self.backend,
            build_prompt(question, retrieval, history=[], limits=self.limits),
            self.sampling,
        )
        generate_ms = (time.perf_counter() - t0) * 1000.0
        flags = sum(1 for s in result.grounding if s.flagged)
        self.metrics.inc_queries()
        self.metrics.add_grounding_flags(flags)
        self.metrics.observe_retrieval_ms(
            retrieval.timings["embed_ms"]
            + retrieval.timings["search_ms"]
            + retrieval.timings["rerank_ms"]
        )
        return {
            "answer": result.answer_text,
            "voice_answer": result.voice_ready_text,
            "citations": result.citations,
            "grounding": [
                {"sentence": s.sentence, "support": s.support, "flagged": s.flagged}
                for s in result.grounding
            ],
            "disclaimer_added": result.disclaimer_added,
            "evidence": [item_to_dict(item) for item in retrieval.items],
            "timings": {**retrieval.timings, "generate_ms": generate_ms},
        }

    def _gateway_answer(self, question: str, history: list[dict]) -> dict:
        retrieval = retrieve(
            question, self.retrieval_cfg, self.require_index(), self.provider, self.require_stats()
        )
        result = run_generation(
            self.backend,
            build_prompt(question, retrieval, history=history, limits=self.limits),
            self.sampling,
        )
        self.metrics.inc_queries()
        self.metrics.add_grounding_flags(sum(1 for s in result.grounding if s.flagged))
        return {
            "reply": result.answer_text,
            "voice_reply": result.voice_ready_text,
            "citations": result.citations,
            "evidence": [item_to_dict(item) for item in retrieval.items],
            "flagged_sentences": [s.sentence for s in result.grounding if s.flagged],
        }

    def voice_turn(self, session_id: str, transcript: str) -> dict:
        return self.gateway.handle_turn(session_id, transcript)

    # -- ops ---------------------------------------------------------------------

    def health(self) -> dict:
        index_state = "ok" if self.ensure_index() is not None else "missing"
        try:
            self.provider.embed_batch(["ok"])
            provider_state = "ok"
        except AdvisorError as exc:
            provider_state = f"unreachable: {exc}"
        if self.config.backend.kind == "stub":
            backend_state = "ok"
        else:
            try:
                self.backend.complete(
                    [{"role": "user", "content": "ping"}],
                    SamplingConfig(max_output_tokens=1),
                )
                backend_state = "ok"
            except AdvisorError as exc:
                backend_state = f"unreachable: {exc}"
        return {"index": index_state, "backend": backend_state, "provider": provider_state}
