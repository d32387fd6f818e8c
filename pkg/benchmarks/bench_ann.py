"""Compiled vs pure-Python graph backend: build time, query latency, recall.

    python benchmarks/bench_ann.py [--n 10000] [--queries 100] [--dims 384]

The pure backend is the portability fallback; this prints what the Cython
kernel buys on identical data.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from agroadvisor.embeddings import EmbeddingVector
from agroadvisor.index import VectorIndex, available_backends


def run_backend(backend: str, X: np.ndarray, Q: np.ndarray, k: int) -> dict:
    idx = VectorIndex(dims=X.shape[1], backend=backend)
    t0 = time.perf_counter()
    for i, v in enumerate(X):
        idx.add({"chunk_id": f"v{i:06d}"}, EmbeddingVector(v))
    build_s = time.perf_counter() - t0

    exact = []
    for qv in Q:
        q = EmbeddingVector(qv)
        exact.append({cid for cid, _ in idx.exact_search(q, k)})

    t0 = time.perf_counter()
    recalls = []
    for qv, truth in zip(Q, exact):
        q = EmbeddingVector(qv)
        got = {cid for cid, _ in idx.ann_search(q, k)}
        recalls.append(len(got & truth) / k)
    query_ms = (time.perf_counter() - t0) * 1000.0 / len(Q)
    return {
        "backend": backend,
        "build_s": build_s,
        "query_ms": query_ms,
        "recall": float(np.mean(recalls)),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--queries", type=int, default=100)
    parser.add_argument("--dims", type=int, default=384)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    X = rng.normal(size=(args.n, args.dims))
    X = (X / np.linalg.norm(X, axis=1, keepdims=True)).astype(np.float32)
    Q = rng.normal(size=(args.queries, args.dims))
    Q = (Q / np.linalg.norm(Q, axis=1, keepdims=True)).astype(np.float32)

    print(f"n={args.n} dims={args.dims} queries={args.queries} k={args.k}")
    print(f"{'backend':<10} {'build':>10} {'ms/query':>10} {'recall@k':>10}")
    rows = []
    for backend in available_backends():
        row = run_backend(backend, X, Q, args.k)
        rows.append(row)
        print(
            f"{row['backend']:<10} {row['build_s']:>9.2f}s {row['query_ms']:>10.2f} "
            f"{row['recall']:>10.4f}"
        )
    if len(rows) == 2:
        speedup = rows[1]["build_s"] / rows[0]["build_s"]
        print(f"\ncompiled kernel build speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()
