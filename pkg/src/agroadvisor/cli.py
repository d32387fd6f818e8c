"""Operator CLI: ingest | index | query | serve | eval.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .corpus import ChunkingConfig, read_chunks, write_chunk_files, write_chunks_jsonl
from .errors import AdvisorError
from .evaluation import build_report, load_coverage, load_records, write_report
from .service import AdvisoryEngine, ServiceConfig


def _engine(args: argparse.Namespace) -> AdvisoryEngine:
    config = ServiceConfig.load(getattr(args, "config", None))
    if getattr(args, "index_dir", None):
        config.index_dir = args.index_dir
    return AdvisoryEngine(config)


def _cmd_ingest(args: argparse.Namespace) -> int:
    engine = _engine(args)
    chunking = ChunkingConfig(
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
    )
    chunks = engine.ingest_manifest(args.manifest, args.rules, chunking)
    out = Path(args.out)
    if args.format == "md":
        write_chunk_files(chunks, out)
    else:
        out.mkdir(parents=True, exist_ok=True)
        write_chunks_jsonl(chunks, out / "chunks.jsonl")
    print(f"ingested {len({c.doc_id for c in chunks})} documents into {len(chunks)} chunks at {out}")
    return 0


def _cmd_index(args: argparse.Namespace) -> int:
    engine = _engine(args)
    if args.provider:
        engine.config.embedding.provider = args.provider
        from .embeddings import make_provider

        engine.provider = make_provider(args.provider, dims=engine.config.embedding.dims)
    chunks = read_chunks(args.chunks)
    engine.config.index_dir = args.out
    engine.build_index(chunks)
    print(f"indexed {len(chunks)} chunks into {args.out} (provider={engine.provider.name})")
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    engine = _engine(args)
    response = engine.query(args.text, k=args.k)
    print(f"উত্তর: {response['answer']}")
    if response["citations"]:
        print(f"উৎস: {', '.join(response['citations'])}")
    if args.explain:
        print("\nevidence:")
        for item in response["evidence"]:
            print(
                f"  {item['chunk_id']}  fused={item['fused']:.4f} "
                f"semantic={item['semantic']:.4f} lexical={item['lexical']:.4f} "
                f"boost={item['metadata_boost']:.1f}  topic={item['topic']}"
            )
        flagged = [g for g in response["grounding"] if g["flagged"]]
        print(f"\ngrounding: {len(response['grounding'])} sentences, {len(flagged)} flagged")
        timings = ", ".join(f"{k}={v:.1f}" for k, v in response["timings"].items())
        print(f"timings(ms): {timings}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service.app import serve

    engine = _engine(args)
    if args.host:
        engine.config.server.host = args.host
    if args.port:
        engine.config.server.port = args.port
    serve(engine)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    engine = _engine(args)
    records = load_records(args.records)
    baseline = load_records(args.baseline)
    coverage = load_coverage(args.coverage) if args.coverage else None
    report = build_report(records, baseline, coverage, engine.provider)
    paths = write_report(report, args.out)
    print(f"wrote {len(paths)} report files to {args.out}")
    summary = report.to_dict()
    print(
        "composite: {c} vs {b} ({g:+.1f}%)".format(
            c=summary["rubric"]["candidate"]["composite_display"],
            b=summary["rubric"]["baseline"]["composite_display"],
            g=summary["rubric"]["composite_gain"]["display"],
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agroadvisor",
        description="Retrieval-augmented agricultural advisory engine",
    )
    parser.add_argument("--config", help="YAML config path", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize, correct and segment a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--rules", default=None, help="correction rules JSON (default: built-in)")
    p.add_argument("--out", required=True)
    p.add_argument("--min-tokens", type=int, default=150)
    p.add_argument("--max-tokens", type=int, default=300)
    p.add_argument("--format", choices=("jsonl", "md"), default="jsonl")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("index", help="embed chunks and build the vector index")
    p.add_argument("--chunks", required=True, help="chunks.jsonl or a directory of .md files")
    p.add_argument("--out", required=True)
    p.add_argument("--provider", default=None, help="fallback | remote(url)")
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("query", help="answer one question against the index")
    p.add_argument("--text", required=True)
    p.add_argument("--index-dir", dest="index_dir", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--index-dir", dest="index_dir", default=None)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("eval", help="build the comparison report from scored records")
    p.add_argument("--records", required=True, help="candidate-system JSONL")
    p.add_argument("--baseline", required=True, help="baseline-system JSONL")
    p.add_argument("--coverage", default=None, help="coverage JSONL (both systems)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="ts=%(asctime)s level=%(levelname)s module=%(name)s msg=%(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AdvisorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
