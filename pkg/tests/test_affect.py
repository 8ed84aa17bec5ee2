from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from urbanlore.affect import (
    EMOTIONS,
    EmotionSpace,
    PolarityLexicon,
    SenseEntry,
    build_emotion_space,
    document_sentiment,
    emotion_load,
    load_emotion_space,
    load_polarity_lexicon,
    prior_polarity,
    save_emotion_space,
    term_document_matrix,
    truncated_svd,
)
from urbanlore.errors import (
    EmotionWithoutSeeds,
    EmptyDocument,
    FormatError,
    InsufficientCorpus,
    InvariantError,
    OutOfVocabularyDocument,
    UnknownLemma,
)


def lexicon(**scores):
    return PolarityLexicon({
        lemma: [SenseEntry(lemma, i + 1, p, n) for i, (p, n) in enumerate(senses)]
        for lemma, senses in scores.items()
    })


@pytest.mark.parametrize(
    "pos_scores, expected",
    [([0.75], 0.75), ([0.5, 0.25], 0.416667), ([1.0, 0.0, 0.0], 6 / 11)],
)
def test_prior_polarity_examples(pos_scores, expected):
    lex = lexicon(w=[(p, 0.0) for p in pos_scores])
    assert prior_polarity("w", lex)[0] == pytest.approx(expected, abs=1e-6)


def test_prior_polarity_case_insensitive_and_unknown():
    lex = lexicon(good=[(0.75, 0.0)])
    assert prior_polarity("GOOD", lex) == (0.75, 0.0)
    with pytest.raises(UnknownLemma):
        prior_polarity("bad", lex)


@given(st.lists(st.tuples(st.floats(0, 0.5), st.floats(0, 0.5)), min_size=1, max_size=12))
def test_prior_polarity_is_convex_combination(senses):
    pos, neg = prior_polarity("w", lexicon(w=senses))
    ps, ns = [s[0] for s in senses], [s[1] for s in senses]
    assert min(ps) - 1e-12 <= pos <= max(ps) + 1e-12
    assert min(ns) - 1e-12 <= neg <= max(ns) + 1e-12


def test_load_polarity_lexicon(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("cool\t1\t0.5\t0.0\ncool\t2\t0.0\t0.25\nice\t1\t0.0\t0.0\n", encoding="utf-8")
    lex = load_polarity_lexicon(p)
    assert len(lex) == 2
    assert [e.sense_rank for e in lex.entries["cool"]] == [1, 2]
    p.write_text("good\t1\t0.75\t0.0\n", encoding="utf-8")
    assert len(load_polarity_lexicon(p)) == 1


@pytest.mark.parametrize(
    "content, exc",
    [
        ("good\t1\t0.75\t0.0\ngood\t1\t0.5\t0.0\n", FormatError),
        ("good\t1\tx\t0.0\n", FormatError),
        ("good\t1\t0.75\n", FormatError),
        ("good\t1\t0.75\t0.5\n", InvariantError),
        ("good\t2\t0.5\t0.0\n", InvariantError),
    ],
)
def test_load_polarity_lexicon_errors(tmp_path, content, exc):
    p = tmp_path / "lex.tsv"
    p.write_text(content, encoding="utf-8")
    with pytest.raises(exc):
        load_polarity_lexicon(p)


def test_document_sentiment_examples():
    lex = lexicon(happy=[(0.5, 0.0)])
    s = document_sentiment("one two three four five six seven eight nine happy", lex)
    assert s.pos == pytest.approx(5.0) and s.neg == 0.0 and s.all == pytest.approx(5.0)
    assert document_sentiment("nothing here is known", lex) == type(s)(0.0, 0.0, 0.0)
    with pytest.raises(EmptyDocument):
        document_sentiment("!!", lex)


@given(st.lists(st.sampled_from(["good", "bad", "cool", "rock", "tree", "and"]), min_size=1, max_size=50))
def test_document_sentiment_matches_brute_force(words):
    lex = lexicon(good=[(0.75, 0.0)], bad=[(0.0, 0.625)], cool=[(0.5, 0.0), (0.0, 0.25)])
    expected_pos = sum(prior_polarity(w, lex)[0] for w in words if w in lex)
    expected_neg = sum(prior_polarity(w, lex)[1] for w in words if w in lex)
    s = document_sentiment(" ".join(words), lex)
    assert s.pos == pytest.approx(100 * expected_pos / len(words), abs=1e-9)
    assert s.neg == pytest.approx(100 * expected_neg / len(words), abs=1e-9)
    assert s.all == pytest.approx(s.pos + s.neg)


TOY_DOCS = ["apple apple banana", "banana cherry", "cherry date date apple"]


def dense_oracle(d):
    vocab, m = term_document_matrix(TOY_DOCS)
    u, s, vt = np.linalg.svd(m.toarray(), full_matrices=False)
    u, s = u[:, :d], s[:d]
    piv = np.abs(u).argmax(axis=0)
    return vocab, u * np.sign(u[piv, np.arange(d)]), s


def test_truncated_svd_matches_dense_oracle():
    vocab, m = term_document_matrix(TOY_DOCS)
    assert vocab == ["apple", "banana", "cherry", "date"]
    assert m.shape == (4, 3)
    assert m[0, 0] == pytest.approx(math.log(3))
    _, u_ref, s_ref = dense_oracle(2)
    u, s, vt = truncated_svd(m, 2, seed=0)
    np.testing.assert_allclose(s, s_ref, atol=1e-10)
    np.testing.assert_allclose(u, u_ref, atol=1e-10)


TOY_SEEDS = {"anger": ["apple"], "disgust": ["banana"], "fear": ["cherry"], "joy": ["date"],
             "sadness": ["apple", "banana"], "surprise": ["cherry", "date"]}


def toy_space(seed=0):
    return build_emotion_space(TOY_DOCS, dims=2, seeds=TOY_SEEDS, seed=seed, min_documents=3)


def test_toy_emotion_load_matches_hand_cosines():
    vocab, u, _ = dense_oracle(2)
    idx = {w: i for i, w in enumerate(vocab)}
    doc = "apple cherry date"
    v = u[[idx["apple"], idx["cherry"], idx["date"]]].mean(axis=0)
    v /= np.linalg.norm(v)
    got = emotion_load(doc, toy_space())
    for label in EMOTIONS:
        c = u[[idx[w] for w in TOY_SEEDS[label]]].mean(axis=0)
        c /= np.linalg.norm(c)
        assert got.similarities[label] == pytest.approx((1 + c @ v) / 2, abs=1e-9)


def test_build_is_deterministic():
    a, b = toy_space(), toy_space()
    assert np.array_equal(a.vectors, b.vectors) and np.array_equal(a.centroids, b.centroids)


def test_missing_joy_seeds():
    seeds = dict(TOY_SEEDS, joy=["zebra"])
    with pytest.raises(EmotionWithoutSeeds) as err:
        build_emotion_space(TOY_DOCS, dims=2, seeds=seeds, min_documents=3)
    assert err.value.label == "joy"


def test_small_corpus_rejected():
    with pytest.raises(InsufficientCorpus):
        build_emotion_space(TOY_DOCS, dims=2, seeds=TOY_SEEDS)


def orthogonal_space():
    eye = np.eye(6)
    vocab = tuple(f"w{k}" for k in range(6)) + ("blank",)
    vectors = np.vstack([eye, np.zeros((1, 6))])
    return EmotionSpace(vocab, vectors, eye.copy())


def test_joy_centroid_document():
    space = orthogonal_space()
    load = emotion_load(f"w{EMOTIONS.index('joy')}", space)
    assert load.similarities["joy"] == 1.0
    assert all(load.similarities[e] == 0.5 for e in EMOTIONS if e != "joy")
    assert load.all == pytest.approx(3.5 / 6)
    assert round(load.all, 4) == 0.5833


def test_document_orthogonal_to_centroids():
    vectors = np.zeros((1, 7))
    vectors[0, 6] = 1.0
    centroids = np.hstack([np.eye(6), np.zeros((6, 1))])
    load = emotion_load("x", EmotionSpace(("x",), vectors, centroids))
    assert all(v == 0.5 for v in load.similarities.values())


def test_out_of_vocabulary_document():
    with pytest.raises(OutOfVocabularyDocument):
        emotion_load("nothing known", orthogonal_space())
    with pytest.raises(OutOfVocabularyDocument):
        emotion_load("blank", orthogonal_space())


@given(st.floats(1e-3, 1e3))
def test_scale_invariance(k):
    space = toy_space()
    scaled = EmotionSpace(space.vocabulary, space.vectors * k, space.centroids)
    a, b = emotion_load("apple banana date", space), emotion_load("apple banana date", scaled)
    for e in EMOTIONS:
        assert a.similarities[e] == pytest.approx(b.similarities[e], abs=1e-12)


def test_similarities_bounded(small_space, synthetic_records):
    for r in synthetic_records[:30]:
        load = emotion_load(r.text, small_space)
        assert all(0.0 <= v <= 1.0 for v in load.similarities.values())
        assert load.all == pytest.approx(sum(load.similarities.values()) / 6)


def test_save_load_round_trip(tmp_path, small_space):
    p = tmp_path / "space.bin"
    save_emotion_space(small_space, p)
    back = load_emotion_space(p)
    assert back.vocabulary == small_space.vocabulary
    np.testing.assert_array_equal(back.vectors, small_space.vectors.astype("<f4"))
    raw = bytearray(p.read_bytes())
    raw[-1] ^= 0xFF
    p.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        load_emotion_space(p)
