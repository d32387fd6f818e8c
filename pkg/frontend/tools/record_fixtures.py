"""Record REST API fixtures for the console's contract tests.

Runs the advisory service in-process (stub backend, fallback embedder) over
a small deterministic corpus and snapshots real responses into
frontend/tests/fixtures/. Re-run after changing the API surface:

    python frontend/tools/record_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from agroadvisor.evaluation import (
    COVERAGE_FEATURES,
    RUBRIC_METRICS,
    CoverageRecord,
    EvalRecord,
    build_report,
    write_report,
)
from agroadvisor.service import AdvisoryEngine, ServiceConfig, create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent / "tests"))
from fixture_corpus import fixture_documents  # noqa: E402

DOCS = fixture_documents()


def eval_fixture_dir(tmp: Path) -> Path:
    def rubric_rec(qid, scores, label):
        return EvalRecord(
            qid, f"প্রশ্ন {qid}", "ক" * 692, label, dict(zip(RUBRIC_METRICS, scores))
        )

    labels = ["high"] * 8 + ["moderate"] + ["poor"] * 2
    candidate = [rubric_rec(f"c{i}", [5.00, 4.67, 4.33, 4.67, 4.00], l) for i, l in enumerate(labels)]
    baseline = [
        EvalRecord(f"b{i}", f"প্রশ্ন b{i}", "খ" * 87, "moderate",
                   dict(zip(RUBRIC_METRICS, [5.00, 2.33, 3.33, 1.00, 4.00])))
        for i in range(11)
    ]
    coverage = [
        CoverageRecord(f"c{i}", dict(zip(COVERAGE_FEATURES, [True, True, True, i < 2, i < 2, True])))
        for i in range(3)
    ] + [
        CoverageRecord(f"b{i}", dict(zip(COVERAGE_FEATURES, [False, True, False, True, False, i == 0])),
                       "baseline")
        for i in range(3)
    ]
    from agroadvisor.embeddings import HashingProvider

    report = build_report(candidate, baseline, coverage, HashingProvider())
    out = tmp / "evalout"
    write_report(report, out)
    return out


def save(name: str, payload) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / name).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    print(f"recorded {name}")


def main() -> None:
    tmp = Path(tempfile.mkdtemp())
    cfg = ServiceConfig()
    cfg.index_dir = str(tmp / "index")
    cfg.sampling.seed = 7
    cfg.eval.out_dir = str(eval_fixture_dir(tmp))
    engine = AdvisoryEngine(cfg)
    chunks = engine.ingest_documents(DOCS)
    engine.build_index(chunks)
    client = TestClient(create_app(engine))

    save("health.json", client.get("/health").json())

    res = client.post("/query", json={"question": "ধানের জমিতে সেচ কখন দিতে হবে?"})
    assert res.status_code == 200
    save("query_response.json", res.json())

    res = client.post(
        "/voice/turn",
        json={"session_id": "demo", "transcript": "ধানের জমিতে সেচ কখন দিতে হবে"},
    )
    body = res.json()
    assert body["kind"] == "answer" and body["evidence"], body
    save("voice_turn_answer.json", body)

    res = client.post(
        "/voice/turn", json={"session_id": "amb", "transcript": "রোগ দমনে করণীয় কী"}
    )
    body = res.json()
    assert body["state"] == "awaiting_clarification", body
    save("voice_turn_clarification.json", body)

    res = client.post("/voice/turn", json={"session_id": "amb", "transcript": "ধান নিয়ে"})
    body = res.json()
    assert body["state"] == "open" and body["kind"] == "answer", body
    save("voice_turn_after_clarification.json", body)

    save("chunks_page.json", client.get("/chunks", params={"limit": 5}).json())
    first_id = client.get("/chunks", params={"limit": 1}).json()["chunks"][0]["chunk_id"]
    save("chunk_detail.json", client.get(f"/chunks/{first_id}").json())

    save(
        "ingest_response.json",
        client.post(
            "/ingest",
            json={
                "documents": [
                    {
                        "doc_id": d.doc_id,
                        "title": d.title,
                        "source_kind": d.source_kind,
                        "language": d.language,
                        "raw_text": d.raw_text,
                        "provenance": d.provenance,
                    }
                    for d in DOCS
                ]
            },
        ).json(),
    )

    save("eval_report.json", client.get("/eval/report").json())
    engine.config.eval.out_dir = None
    missing = client.get("/eval/report")
    save("eval_report_missing.json", {"status": missing.status_code, **missing.json()})

    bad = client.post("/ingest", json={"documents": [{"doc_id": "x"}]})
    save("ingest_error.json", {"status": bad.status_code, **bad.json()})


if __name__ == "__main__":
    main()
