import hashlib
import json
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from agroadvisor.embeddings import (
    EmbeddingVector,
    HashingProvider,
    RemoteProvider,
    cosine,
    embed,
    make_provider,
    unit,
)
from agroadvisor.errors import DimensionMismatch, EmptyInput, ProviderUnavailable


def reference_hash_embed(text: str, dims: int = 384) -> np.ndarray:
    """Offline reimplementation of the hashing embedder, written from its
    stated definition (word 3-5 grams, signed feature hashing, L2 norm)."""
    import unicodedata

    # word extraction mirroring the documented token definition
    words = []
    current = []
    for ch in text:
        cat = unicodedata.category(ch)
        if cat[0] in "LMN" or ch in "‌‍":
            current.append(ch)
        elif current:
            words.append("".join(current))
            current = []
    if current:
        words.append("".join(current))
    words = [w.translate({0x200C: None, 0x200D: None}).casefold() for w in words]
    words = [w for w in words if w]

    grams: Counter = Counter()
    for w in words:
        if len(w) < 3:
            grams[w] += 1
            continue
        for n in (3, 4, 5):
            for i in range(len(w) - n + 1):
                grams[w[i : i + n]] += 1
    acc = np.zeros(dims)
    for gram, count in grams.items():
        h = int.from_bytes(hashlib.blake2b(gram.encode(), digest_size=8).digest(), "little")
        acc[h % dims] += (1.0 if (h >> 63) & 1 == 0 else -1.0) * count
    return acc / np.linalg.norm(acc)


def test_embed_deterministic():
    p = HashingProvider()
    a = embed(p, "ধান")
    b = embed(p, "ধান")
    assert np.array_equal(a.values, b.values)


def test_self_cosine_is_one():
    p = HashingProvider()
    v = embed(p, "রোপা আমন ধান")
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-6)


def test_word_multiset_similarity_dominates():
    p = HashingProvider()
    a = embed(p, "রোপা আমন ধান")
    b = embed(p, "আমন ধান রোপা")
    c = embed(p, "গরুর খামার")
    assert cosine(a, b) > cosine(a, c)
    # verify both cosines against the independent reimplementation
    ra, rb, rc = (reference_hash_embed(t) for t in ("রোপা আমন ধান", "আমন ধান রোপা", "গরুর খামার"))
    assert cosine(a, b) == pytest.approx(float(ra @ rb), abs=1e-6)
    assert cosine(a, c) == pytest.approx(float(ra @ rc), abs=1e-6)


def test_reorder_invariant_substitution_not():
    p = HashingProvider()
    a = embed(p, "সার পানি বীজ")
    b = embed(p, "বীজ সার পানি")
    c = embed(p, "সার পানি পোকা")
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_matches_reference_implementation_exactly():
    p = HashingProvider()
    for text in ("ধান", "ab", "ধান চাষ ভালো হয়", "mixed ধান text ২০"):
        got = embed(p, text).values
        want = reference_hash_embed(text).astype(np.float32)
        assert np.allclose(got, want, atol=1e-7)


def test_empty_input_rejected():
    with pytest.raises(EmptyInput):
        embed(HashingProvider(), "   ")


def test_unit_norm_enforced():
    with pytest.raises(ValueError):
        EmbeddingVector(np.ones(8, dtype=np.float32))
    v = unit(np.ones(8))
    assert v.dims == 8
    with pytest.raises(ValueError):
        unit(np.zeros(4))
    with pytest.raises(ValueError):
        EmbeddingVector(np.array([np.nan] * 4, dtype=np.float32))


def test_cosine_examples_and_oracle():
    e1 = EmbeddingVector(np.eye(4, dtype=np.float32)[0])
    e2 = EmbeddingVector(np.eye(4, dtype=np.float32)[1])
    assert cosine(e1, e1) == 1.0
    assert cosine(e1, e2) == 0.0

    rng = np.random.default_rng(0)
    for _ in range(100):
        a = unit(rng.normal(size=16))
        b = unit(rng.normal(size=16))
        naive = sum(float(x) * float(y) for x, y in zip(a.values, b.values))
        assert cosine(a, b) == pytest.approx(naive, abs=1e-9)

    with pytest.raises(DimensionMismatch):
        cosine(unit(np.ones(4)), unit(np.ones(8)))


def test_make_provider_specs():
    assert isinstance(make_provider("fallback"), HashingProvider)
    remote = make_provider("remote(http://localhost:1/embed)")
    assert isinstance(remote, RemoteProvider)
    with pytest.raises(ValueError):
        make_provider("magic")


class _EmbedHandler(BaseHTTPRequestHandler):
    fail_with: int | None = None

    def do_POST(self):
        if self.fail_with:
            self.send_response(self.fail_with)
            self.send_header("Retry-After", "7")
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        texts = json.loads(self.rfile.read(length))["texts"]
        rng = np.random.default_rng(sum(len(t) for t in texts))
        vectors = [list(rng.normal(size=8)) for _ in texts]
        body = json.dumps({"vectors": vectors}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def embed_server():
    server = HTTPServer(("127.0.0.1", 0), _EmbedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/embed"
    server.shutdown()


def test_remote_provider_contract(embed_server):
    _EmbedHandler.fail_with = None
    p = RemoteProvider(embed_server, dims=8)
    vectors = p.embed_batch(["ক", "খ"])
    assert len(vectors) == 2
    for v in vectors:
        assert abs(float(np.linalg.norm(v.values.astype(np.float64))) - 1.0) < 1e-6


def test_remote_provider_unavailable_carries_retry_after(embed_server):
    _EmbedHandler.fail_with = 503
    p = RemoteProvider(embed_server, dims=8)
    with pytest.raises(ProviderUnavailable) as err:
        p.embed_batch(["ক"])
    assert err.value.retry_after == 7.0
    _EmbedHandler.fail_with = None


def test_remote_provider_unreachable():
    p = RemoteProvider("http://127.0.0.1:9/embed", dims=8, timeout=0.5)
    with pytest.raises(ProviderUnavailable):
        p.embed_batch(["ক"])
