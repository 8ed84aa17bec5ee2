from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from urbanlore.errors import DegenerateProfile, InsufficientRows, NonFiniteFeature
from urbanlore.features import (
    COVERAGE_DIMS,
    GROUPS,
    FeatureSchema,
    FeatureVector,
    Resources,
    apply_scaler,
    coverage,
    extract_features,
    fit_scaler,
    parse_groups,
    read_feature_csv,
    write_feature_csv,
)
from urbanlore.text_core import AnnotationSpan, Document, TextProfile


def test_schema_has_21_dims():
    assert len(FeatureSchema()) == 21
    assert FeatureSchema().label == "ALL"
    assert len(FeatureSchema(("READ",))) == 6
    assert FeatureSchema(("read", "ne")).groups == ("NE", "READ")


@pytest.mark.parametrize("spec", ["", "ne,bogus", "x"])
def test_parse_groups_rejects(spec):
    with pytest.raises(ValueError):
        parse_groups(spec)


def test_coverage_span_counts_once():
    profile = TextProfile(words=50, sentences=3, syllables=70, complex_words=2)
    assert coverage([AnnotationSpan(4, 7, "LOC")], profile) == 0.02
    assert coverage([], profile) == 0.0
    with pytest.raises(DegenerateProfile):
        coverage([], TextProfile(0, 1, 0, 0))


@given(st.lists(st.tuples(st.integers(0, 90), st.integers(1, 5), st.sampled_from(["PER", "LOC", "ORG", "MISC"])),
                max_size=12))
def test_coverage_matches_recount(raw):
    spans = [AnnotationSpan(a, a + n, tag) for a, n, tag in raw]
    profile = TextProfile(words=100, sentences=5, syllables=140, complex_words=5)
    total = coverage(spans, profile)
    assert total == len(spans) / 100
    per_tag = sum(coverage(spans, profile, [t]) for t in ("PER", "LOC", "ORG", "MISC"))
    assert per_tag == pytest.approx(total)
    assert 0 <= total <= 1


def test_mixed_spans_four_percent():
    spans = [AnnotationSpan(0, 1, "PER"), AnnotationSpan(3, 6, "LOC"), AnnotationSpan(9, 10, "ORG"),
             AnnotationSpan(20, 22, "MISC")]
    assert coverage(spans, TextProfile(100, 5, 150, 10)) == 0.04


@pytest.fixture(scope="module")
def resources(small_space):
    return Resources.default(small_space)


def test_extract_full_and_partial(resources, synthetic_records):
    doc = Document("x", synthetic_records[0].text)
    full = extract_features(doc, resources)
    assert len(full.values) == 21
    read = extract_features(doc, resources, ["READ"])
    assert read.names == GROUPS["READ"]
    assert read.values == full.values[-6:]
    assert full["NE_ALL"] == pytest.approx(sum(full[t] for t in ("PER", "LOC", "ORG", "MISC")))
    assert full["TIMEX_ALL"] == pytest.approx(full["DATE"] + full["DURATION"] + full["TIME"])


def test_plain_doc_has_zero_coverage(resources):
    doc = Document("x", "the dog ran to the old house and sat by the door.")
    v = extract_features(doc, resources)
    assert all(v[n] == 0.0 for n in COVERAGE_DIMS)


def test_aff_without_space_is_rejected():
    with pytest.raises(ValueError):
        extract_features(Document("x", "a calm day."), Resources.default(None), ["AFF"])


def test_non_finite_vector_rejected():
    with pytest.raises(NonFiniteFeature):
        FeatureVector("d", ("a", "b"), (1.0, float("nan")))


def test_scaler_examples():
    s = fit_scaler([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    z = apply_scaler(s, [[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    np.testing.assert_allclose(z[:, 0], [-1.2247449, 0.0, 1.2247449], atol=1e-6)
    assert np.all(z[:, 1] == 0.0)
    with pytest.raises(InsufficientRows):
        fit_scaler([[1.0, 2.0]])


def test_scaler_random_matrix():
    m = np.random.default_rng(7).normal(3.0, 2.5, size=(100, 21))
    z = apply_scaler(fit_scaler(m), m)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-9)


@given(arrays(np.float64, st.tuples(st.integers(2, 20), st.integers(1, 5)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_scaler_inverse(m):
    s = fit_scaler(m)
    z = s.transform(m)
    back = s.inverse(z)
    live = s.std > 0
    np.testing.assert_allclose(back[:, live], m[:, live], rtol=1e-9, atol=1e-6)
    assert np.all(z[:, ~live] == 0.0)
    assert np.array_equal(s.transform(m), z)


def test_feature_csv_round_trip(tmp_path):
    m = np.random.default_rng(0).random((4, 3)) / 7
    p = tmp_path / "f.csv"
    write_feature_csv(p, ["a", "b", "c", "d"], ["X", "Y", "X", "Y"], ("PER", "LOC", "Fog"), m, "hello")
    assert p.read_text().startswith("# hello\n")
    ids, labels, names, back = read_feature_csv(p)
    assert ids == ["a", "b", "c", "d"] and labels == ["X", "Y", "X", "Y"] and names == ("PER", "LOC", "Fog")
    assert np.array_equal(back, m)
