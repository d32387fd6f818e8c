import threading

import numpy as np
import pytest

from agroadvisor.embeddings import EmbeddingVector, unit
from agroadvisor.errors import DimensionMismatch, DuplicateId, EmptyIndex
from agroadvisor.index import VectorIndex, available_backends

BACKENDS = available_backends()


def rand_unit(rng, dims=16):
    return unit(rng.normal(size=dims))


def fill(idx, n, dims=16, seed=0):
    rng = np.random.default_rng(seed)
    vs = []
    for i in range(n):
        v = rand_unit(rng, dims)
        idx.add({"chunk_id": f"c{i:05d}"}, v)
        vs.append(v)
    return vs


def test_single_entry_self_search():
    idx = VectorIndex(dims=8)
    v = unit(np.arange(1, 9))
    idx.add({"chunk_id": "only"}, v)
    [(cid, score)] = idx.exact_search(v, 1)
    assert cid == "only"
    assert score == pytest.approx(1.0, abs=1e-6)
    [(cid, score)] = idx.ann_search(v, 1)
    assert cid == "only"


def test_three_known_vectors_hand_computed_order():
    # Hand-computed cosines against q = (1,0,0,0):
    #   a=(1,0,0,0)·q = 1.0, b=(0.6,0.8,0,0)·q = 0.6, c=(0,1,0,0)·q = 0.0
    idx = VectorIndex(dims=4)
    idx.add({"chunk_id": "a"}, EmbeddingVector(np.array([1, 0, 0, 0], np.float32)))
    idx.add({"chunk_id": "b"}, EmbeddingVector(np.array([0.6, 0.8, 0, 0], np.float32)))
    idx.add({"chunk_id": "c"}, EmbeddingVector(np.array([0, 1, 0, 0], np.float32)))
    q = EmbeddingVector(np.array([1, 0, 0, 0], np.float32))
    results = idx.exact_search(q, 3)
    assert [cid for cid, _ in results] == ["a", "b", "c"]
    assert results[0][1] == pytest.approx(1.0)
    assert results[1][1] == pytest.approx(0.6, abs=1e-6)
    assert results[2][1] == pytest.approx(0.0)


def test_k_larger_than_index_returns_all():
    idx = VectorIndex(dims=16)
    fill(idx, 5)
    rng = np.random.default_rng(1)
    assert len(idx.exact_search(rand_unit(rng), 50)) == 5
    assert len(idx.ann_search(rand_unit(rng), 50)) == 5


def test_identical_vectors_tie_broken_by_chunk_id():
    idx = VectorIndex(dims=8)
    v = unit(np.ones(8))
    idx.add({"chunk_id": "zzz"}, v)
    idx.add({"chunk_id": "aaa"}, v)
    results = idx.exact_search(v, 2)
    assert [cid for cid, _ in results] == ["aaa", "zzz"]
    results = idx.ann_search(v, 2)
    assert [cid for cid, _ in results] == ["aaa", "zzz"]


def test_duplicate_id_rejected():
    idx = VectorIndex(dims=8)
    v = unit(np.ones(8))
    idx.add({"chunk_id": "x"}, v)
    with pytest.raises(DuplicateId):
        idx.add({"chunk_id": "x"}, v)


def test_dimension_mismatch():
    idx = VectorIndex(dims=8)
    with pytest.raises(DimensionMismatch):
        idx.add({"chunk_id": "x"}, unit(np.ones(4)))
    idx.add({"chunk_id": "x"}, unit(np.ones(8)))
    with pytest.raises(DimensionMismatch):
        idx.exact_search(unit(np.ones(4)), 1)
    with pytest.raises(DimensionMismatch):
        idx.ann_search(unit(np.ones(4)), 1)


def test_empty_index_raises():
    idx = VectorIndex(dims=8)
    with pytest.raises(EmptyIndex):
        idx.exact_search(unit(np.ones(8)), 1)
    with pytest.raises(EmptyIndex):
        idx.ann_search(unit(np.ones(8)), 1)


@pytest.mark.parametrize("backend", BACKENDS)
def test_small_index_ann_equals_exact(backend):
    # index smaller than the beam: exhaustive regime, identical result sets
    idx = VectorIndex(dims=16, backend=backend)
    fill(idx, 120, seed=3)
    rng = np.random.default_rng(4)
    for _ in range(20):
        q = rand_unit(rng)
        assert idx.ann_search(q, 10) == idx.exact_search(q, 10)


@pytest.mark.parametrize("backend", BACKENDS)
def test_ann_results_subset_of_ids_and_sorted(backend):
    idx = VectorIndex(dims=16, backend=backend)
    fill(idx, 300, seed=5)
    rng = np.random.default_rng(6)
    ids = {f"c{i:05d}" for i in range(300)}
    for _ in range(10):
        results = idx.ann_search(rand_unit(rng), 7)
        assert {cid for cid, _ in results} <= ids
        scores = [s for _, s in results]
        assert scores == sorted(scores, reverse=True)


def test_persistence_round_trip_byte_identical(tmp_path):
    idx = VectorIndex(dims=16)
    fill(idx, 64, seed=7)
    rng = np.random.default_rng(8)
    queries = [rand_unit(rng) for _ in range(10)]
    before = [idx.exact_search(q, 5) for q in queries]
    idx.save(tmp_path / "idx")

    loaded = VectorIndex.load(tmp_path / "idx")
    after = [loaded.exact_search(q, 5) for q in queries]
    assert before == after  # exact float equality, not approx
    for q in queries:
        assert loaded.ann_search(q, 5) == idx.ann_search(q, 5)


def test_rebuild_from_entries_alone(tmp_path):
    idx = VectorIndex(dims=16)
    fill(idx, 40, seed=9)
    idx.save(tmp_path / "idx")
    loaded = VectorIndex.load(tmp_path / "idx")
    assert len(loaded) == 40
    assert loaded.metadata("c00007") == {"chunk_id": "c00007"}


def test_stored_vectors_unit_norm(tmp_path):
    idx = VectorIndex(dims=16)
    fill(idx, 10, seed=10)
    idx.save(tmp_path / "idx")
    raw = np.fromfile(tmp_path / "idx" / "vectors.f32", dtype="<f4").reshape(10, 16)
    norms = np.linalg.norm(raw.astype(np.float64), axis=1)
    assert np.all(np.abs(norms - 1.0) < 1e-6)


def test_concurrent_readers_never_see_partial_entries():
    idx = VectorIndex(dims=16)
    fill(idx, 50, seed=11)
    rng = np.random.default_rng(12)
    q = rand_unit(rng)
    errors = []

    def reader():
        for _ in range(200):
            try:
                results = idx.ann_search(q, 5)
                assert len(results) == 5
            except Exception as exc:  # noqa: BLE001
                errors.append(exc)

    def writer():
        local = np.random.default_rng(13)
        for i in range(200):
            idx.add({"chunk_id": f"w{i:05d}"}, rand_unit(local))

    threads = [threading.Thread(target=reader) for _ in range(4)] + [
        threading.Thread(target=writer)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(idx) == 250


def test_exact_search_invariant_under_insertion_order():
    rng = np.random.default_rng(21)
    vectors = [rand_unit(rng) for _ in range(40)]
    ids = [f"c{i:05d}" for i in range(40)]
    q = rand_unit(rng)

    idx_fwd = VectorIndex(dims=16)
    for cid, v in zip(ids, vectors):
        idx_fwd.add({"chunk_id": cid}, v)
    idx_rev = VectorIndex(dims=16)
    for cid, v in zip(reversed(ids), reversed(vectors)):
        idx_rev.add({"chunk_id": cid}, v)
    assert idx_fwd.exact_search(q, 10) == idx_rev.exact_search(q, 10)


@pytest.mark.parametrize("backend", BACKENDS)
def test_backend_deterministic(backend):
    results = []
    for _ in range(2):
        idx = VectorIndex(dims=16, backend=backend)
        fill(idx, 200, seed=14)
        rng = np.random.default_rng(15)
        results.append([idx.ann_search(rand_unit(rng), 5) for _ in range(5)])
    assert results[0] == results[1]
