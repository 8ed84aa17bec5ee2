from __future__ import annotations

import numpy as np
import pytest

from urbanlore.affect import default_lexicon, document_sentiment
from urbanlore.corpus import filter_min_tokens
from urbanlore.errors import InvalidSpec
from urbanlore.features import Resources, extract_features
from urbanlore.ner import default_gazetteer, recognize_entities
from urbanlore.stats import LabelSpec, SynthSpec, describe, generate_synthetic_corpus, three_genre_spec
from urbanlore.text_core import Document


@pytest.fixture(scope="module")
def corpus():
    spec = three_genre_spec(60)
    return spec, generate_synthetic_corpus(spec, seed=0)


def test_ids_and_labels(corpus):
    spec, recs = corpus
    assert len(recs) == 180
    assert recs[0].id == "FT-0000" and recs[-1].id == "GN-0059"
    assert {r.source for r in recs} == {"synthetic"}


def test_same_seed_identical(corpus):
    spec, recs = corpus
    again = generate_synthetic_corpus(spec, seed=0)
    assert [r.to_json() for r in again] == [r.to_json() for r in recs]
    other = generate_synthetic_corpus(spec, seed=1)
    assert [r.text for r in other] != [r.text for r in recs]


def test_zero_entity_density_gives_no_gazetteer_spans():
    spec = SynthSpec((LabelSpec("X", 10, entities={}, timex={"DATE": 0.01}),))
    gaz = default_gazetteer()
    for r in generate_synthetic_corpus(spec, seed=2):
        assert recognize_entities(Document(r.id, r.text), gaz) == []


def test_all_documents_pass_length_filter(corpus):
    _, recs = corpus
    kept, dropped = filter_min_tokens(recs)
    assert not dropped and len(kept) == len(recs)


def test_realized_coverage_within_quarter_of_targets(corpus):
    spec, recs = corpus
    res = Resources.default(None)
    for ls in spec.labels:
        rows = [extract_features(Document(r.id, r.text), res, ["NE", "TIMEX"])
                for r in recs if r.label == ls.label]
        names = rows[0].names
        mean = dict(zip(names, np.mean([r.values for r in rows], axis=0)))
        targets = {**ls.entities, **ls.timex,
                   "NE_ALL": sum(ls.entities.values()), "TIMEX_ALL": sum(ls.timex.values())}
        for name, target in targets.items():
            assert abs(mean[name] - target) <= 0.25 * target, (ls.label, name, mean[name], target)


def test_realized_sentiment_within_quarter_of_targets(corpus):
    spec, recs = corpus
    lex = default_lexicon()
    for ls in spec.labels:
        scores = [document_sentiment(r.text, lex) for r in recs if r.label == ls.label]
        pos = np.mean([s.pos for s in scores])
        neg = np.mean([s.neg for s in scores])
        assert abs(pos - ls.pos_sent) <= 0.25 * ls.pos_sent
        assert abs(neg - ls.neg_sent) <= 0.25 * ls.neg_sent


def test_loc_density_two_percent():
    spec = SynthSpec((LabelSpec("X", 40, entities={"LOC": 0.02}),))
    recs = generate_synthetic_corpus(spec, seed=5)
    res = Resources.default(None)
    x = np.array([extract_features(Document(r.id, r.text), res, ["NE"]).values for r in recs])
    loc, _ = describe(x, [r.label for r in recs], ("PER", "LOC", "ORG", "MISC", "NE_ALL")).get("X", "LOC")
    assert abs(loc - 0.02) <= 0.005


@pytest.mark.parametrize(
    "spec",
    [
        SynthSpec(()),
        SynthSpec((LabelSpec("X", 0),)),
        SynthSpec((LabelSpec("X", 5, entities={"LOC": 1.5}),)),
        SynthSpec((LabelSpec("X", 5, entities={"CITY": 0.1}),)),
        SynthSpec((LabelSpec("X", 5, words=(10, 20)),)),
        SynthSpec((LabelSpec("X", 5), LabelSpec("X", 5))),
        SynthSpec((LabelSpec("X", 5, entities={"PER": 0.2, "LOC": 0.1}),)),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(InvalidSpec):
        generate_synthetic_corpus(spec, seed=0)
