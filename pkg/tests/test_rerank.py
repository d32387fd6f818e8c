import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agroadvisor.embeddings import HashingProvider, embed
from agroadvisor.errors import EmptyIndex, EmptyQuery
from agroadvisor.index import VectorIndex
from agroadvisor.rerank import (
    CorpusStats,
    RetrievalConfig,
    _minmax,
    lexical_score,
    metadata_boost,
    retrieve,
)
from agroadvisor.textutil import match_tokens
from conftest import synth_chunks


def textbook_bm25(query_tokens, chunk_text, all_chunk_texts, k1, b):
    """Independent BM25 from the textbook formula (spreadsheet style)."""
    docs = [match_tokens(t) for t in all_chunk_texts]
    n = len(docs)
    avgdl = sum(len(d) for d in docs) / n
    doc = match_tokens(chunk_text)
    dl = len(doc)
    score = 0.0
    for term in sorted(set(query_tokens)):
        df = sum(1 for d in docs if term in d)
        tf = doc.count(term)
        if tf == 0:
            continue
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
    return score


@pytest.fixture(scope="module")
def corpus():
    chunks = synth_chunks(seed=31, n_docs=4, n_sentences=200)
    dicts = [
        {
            "chunk_id": c.chunk_id,
            "text": c.text,
            "topic": c.topic,
            "source_kind": c.source_kind,
            "token_count": c.token_count,
        }
        for c in chunks
    ]
    return dicts, CorpusStats.from_chunks(dicts)


def test_zero_overlap_scores_zero(corpus):
    dicts, stats = corpus
    cfg = RetrievalConfig()
    assert lexical_score(["nonexistentword"], dicts[0], stats, cfg) == 0.0


def test_single_candidate_minmax_degenerate():
    assert _minmax([3.7]) == [1.0]
    assert _minmax([0.0]) == [0.0]
    assert _minmax([2.0, 2.0]) == [1.0, 1.0]
    assert _minmax([0.0, 4.0]) == [0.0, 1.0]


def test_bm25_matches_textbook_recomputation(corpus):
    dicts, stats = corpus
    texts = [d["text"] for d in dicts]
    cfg = RetrievalConfig()
    rng = random.Random(32)
    queries = [
        "ধান রোগ দমন",
        "সেচ পানি",
        "পাট বীজ বপন",
        "ইউরিয়া সার প্রয়োগ মাত্রা",
        "বোরো মৌসুম",
    ]
    checked = 0
    for q in queries:
        q_tokens = match_tokens(q)
        for d in rng.sample(dicts, 20):
            got = lexical_score(q_tokens, d, stats, cfg)
            want = textbook_bm25(q_tokens, d["text"], texts, cfg.bm25_k1, cfg.bm25_b)
            assert got == pytest.approx(want, abs=1e-6)
            checked += 1
    assert checked == 100


def test_metadata_boost_examples():
    chunk = {"topic": "ধান > রোগ", "text": "x"}
    assert metadata_boost(match_tokens("ধানের রোগ কী"), chunk) == 1.0
    assert metadata_boost(["রোগ"], chunk) == 1.0
    assert metadata_boost(["পাট"], chunk) == 0.0
    assert metadata_boost(["রোগ"], {"topic": "", "text": "x"}) == 0.0


def test_metadata_boost_matches_naive_scan():
    rng = random.Random(33)
    vocab = "ধান গম পাট রোগ পোকা সেচ সার বীজ".split()
    for _ in range(50):
        topic = " ".join(rng.sample(vocab, rng.randint(0, 3)))
        query = rng.sample(vocab, rng.randint(1, 4))
        chunk = {"topic": topic, "text": "x"}
        naive = 0.0
        topic_tokens = match_tokens(topic)
        for t in query:
            if t in topic_tokens:
                naive = 1.0
        assert metadata_boost(query, chunk) == naive


@pytest.fixture(scope="module")
def indexed(corpus):
    dicts, stats = corpus
    provider = HashingProvider()
    idx = VectorIndex(dims=provider.dims)
    for d in dicts:
        idx.add(d, embed(provider, d["text"]))
    return idx, provider, stats


def test_pure_semantic_weights_match_ann_order(indexed):
    idx, provider, stats = indexed
    cfg = RetrievalConfig(w_semantic=1.0, w_lexical=0.0, w_metadata=0.0, k_final=10)
    query = "ধান ক্ষেতে রোগ দমন"
    result = retrieve(query, cfg, idx, provider, stats)
    ann = idx.ann_search(embed(provider, query), cfg.k_candidates)
    assert [it.chunk_id for it in result.items] == [cid for cid, _ in ann[:10]]


def test_pure_lexical_weights_match_bm25_order(indexed):
    idx, provider, stats = indexed
    cfg = RetrievalConfig(w_semantic=0.0, w_lexical=1.0, w_metadata=0.0, k_final=10)
    query = "ধান রোগ দমন সার"
    result = retrieve(query, cfg, idx, provider, stats)
    ann = idx.ann_search(embed(provider, query), cfg.k_candidates)
    q_tokens = match_tokens(query)
    scored = sorted(
        ((lexical_score(q_tokens, idx.metadata(cid), stats, cfg), cid) for cid, _ in ann),
        key=lambda t: (-t[0], t[1]),
    )
    assert [it.chunk_id for it in result.items] == [cid for _, cid in scored[:10]]


def test_fused_equals_weighted_components_and_in_unit_interval(indexed):
    idx, provider, stats = indexed
    cfg = RetrievalConfig()
    result = retrieve("সেচ ও সার ব্যবস্থাপনা", cfg, idx, provider, stats)
    for item in result.items:
        explicit = (
            cfg.w_semantic * item.semantic
            + cfg.w_lexical * item.lexical
            + cfg.w_metadata * item.metadata_boost
        )
        assert item.fused == pytest.approx(explicit, abs=1e-9)
        assert 0.0 <= item.fused <= 1.0


def test_retrieve_deterministic(indexed):
    idx, provider, stats = indexed
    cfg = RetrievalConfig()
    a = retrieve("ধান রোগ", cfg, idx, provider, stats)
    b = retrieve("ধান রোগ", cfg, idx, provider, stats)
    assert [(i.chunk_id, i.fused) for i in a.items] == [(i.chunk_id, i.fused) for i in b.items]
    assert set(a.timings) == {"embed_ms", "search_ms", "rerank_ms"}


def test_retrieve_errors(indexed):
    idx, provider, stats = indexed
    with pytest.raises(EmptyQuery):
        retrieve("   ", RetrievalConfig(), idx, provider, stats)
    with pytest.raises(EmptyIndex):
        retrieve("ধান", RetrievalConfig(), VectorIndex(dims=provider.dims), provider, stats)


def test_config_validation():
    with pytest.raises(ValueError):
        RetrievalConfig(w_semantic=0.5, w_lexical=0.5, w_metadata=0.5)
    with pytest.raises(ValueError):
        RetrievalConfig(w_semantic=-0.1, w_lexical=1.05, w_metadata=0.05)
    with pytest.raises(ValueError):
        RetrievalConfig(k_final=30, k_candidates=25)


@settings(max_examples=100)
@given(
    sem=st.lists(st.floats(0, 1, allow_nan=False), min_size=3, max_size=8),
    bump=st.floats(0.01, 0.5),
    pick=st.integers(min_value=0, max_value=7),
)
def test_semantic_monotonicity(sem, bump, pick):
    """Raising only one candidate's semantic component never lowers its rank."""
    pick %= len(sem)
    lex = [0.3] * len(sem)
    boost = [0.0] * len(sem)
    cfg = RetrievalConfig()

    def rank(sems):
        fused = [
            cfg.w_semantic * s + cfg.w_lexical * l + cfg.w_metadata * b
            for s, l, b in zip(sems, lex, boost)
        ]
        order = sorted(range(len(fused)), key=lambda i: (-fused[i], i))
        return order.index(pick)

    before = rank(sem)
    raised = list(sem)
    raised[pick] = min(1.0, raised[pick] + bump)
    assert rank(raised) <= before


def test_rank_invariance_under_affine_semantic_rescale(indexed):
    """argsort of fused scores is unchanged when raw semantic scores get a
    positive affine transform (min-max normalization guarantees it)."""
    raw = [0.91, 0.55, 0.31, 0.88, 0.12]
    lex = [0.2, 0.9, 0.4, 0.1, 0.5]
    cfg = RetrievalConfig()

    def order(sem_raw):
        sem_n = _minmax(sem_raw)
        fused = [cfg.w_semantic * s + cfg.w_lexical * l for s, l in zip(sem_n, lex)]
        return sorted(range(len(fused)), key=lambda i: (-fused[i], i))

    rescaled = [3.0 * s + 11.0 for s in raw]
    assert order(raw) == order(rescaled)
