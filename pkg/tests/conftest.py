"""Shared fixtures: deterministic Bengali corpus synthesis and a wired engine."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from agroadvisor.corpus import ChunkingConfig, SourceDocument, segment
from agroadvisor.service import AdvisoryEngine, ServiceConfig

VOCAB = (
    "ধান গম পাট আলু বেগুন মরিচ সরিষা ভুট্টা পেঁয়াজ রসুন টমেটো লাউ কুমড়া শসা "
    "সেচ সার ইউরিয়া পটাশ জিঙ্ক কম্পোস্ট বীজ চারা রোপণ ফলন কাটা মাড়াই বপন "
    "রোগ পোকা মাজরা বালাই ছত্রাক ব্লাস্ট ঝলসানো দমন কীটনাশক স্প্রে নিড়ানি "
    "জমি মাটি দোআঁশ বেলে এঁটেল পানি বৃষ্টি খরা বন্যা মৌসুম আমন আউশ বোরো"
).split()

TOPICS = ("ধান রোগ", "পাট চাষ", "সবজি পরিচর্যা", "সেচ ব্যবস্থা", "সার প্রয়োগ", "বীজ নির্বাচন")


def synth_sentence(rng: random.Random, n_tokens: int) -> str:
    words = [rng.choice(VOCAB) for _ in range(n_tokens)]
    return " ".join(words) + "।"


def synth_doc_text(
    rng: random.Random,
    n_sentences: int = 120,
    heading_every: int | None = 30,
    sentence_tokens: tuple[int, int] = (6, 14),
) -> str:
    lines = []
    for i in range(n_sentences):
        if heading_every and i % heading_every == 0:
            lines.append(f"## {rng.choice(TOPICS)} {i // heading_every}")
        lines.append(synth_sentence(rng, rng.randint(*sentence_tokens)))
    return "\n".join(lines)


def synth_document(seed: int, doc_id: str, **kwargs) -> SourceDocument:
    rng = random.Random(seed)
    return SourceDocument(
        doc_id=doc_id,
        title=f"নির্দেশিকা {doc_id}",
        source_kind="handbook",
        language="bn",
        raw_text=synth_doc_text(rng, **kwargs),
        provenance="test fixture",
    )


def synth_chunks(seed: int = 7, n_docs: int = 3, **kwargs):
    chunks = []
    for d in range(n_docs):
        doc = synth_document(seed + d, f"doc{d:02d}", **kwargs)
        chunks.extend(segment(doc, ChunkingConfig()))
    return chunks


def write_manifest(path: Path, docs: list[SourceDocument]) -> Path:
    rows = [
        {
            "doc_id": d.doc_id,
            "title": d.title,
            "source_kind": d.source_kind,
            "language": d.language,
            "raw_text": d.raw_text,
            "provenance": d.provenance,
        }
        for d in docs
    ]
    path.write_text(json.dumps(rows, ensure_ascii=False, indent=1), encoding="utf-8")
    return path


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """One visible pass/fail line per acceptance criterion."""
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__ == "test_acceptance":
        label = item.name.removeprefix("test_")
        print(f"\nACCEPTANCE {label}: {'PASS' if rep.passed else 'FAIL'}")


@pytest.fixture()
def service_config(tmp_path: Path) -> ServiceConfig:
    cfg = ServiceConfig()
    cfg.corpus_dir = str(tmp_path / "corpus")
    cfg.index_dir = str(tmp_path / "index")
    return cfg


@pytest.fixture()
def engine(service_config: ServiceConfig, tmp_path: Path) -> AdvisoryEngine:
    """Engine with a small indexed fixture corpus, stub backend throughout."""
    eng = AdvisoryEngine(service_config)
    docs = [synth_document(100 + d, f"doc{d:02d}") for d in range(3)]
    chunks = eng.ingest_documents(docs)
    eng.build_index(chunks)
    return eng
