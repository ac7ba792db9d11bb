"""Preprocessing, indexing and field-weighted scoring."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from ogdsearch.corpus import DatasetRecord
from ogdsearch.textindex import (
    Field,
    FieldWeights,
    build_index,
    load_index,
    match_all,
    match_any,
    preprocess,
    save_index,
    serialize_index,
    surface_tokens,
    text_score,
)


def record(rid="d1", title="", description="", tags=()):
    return DatasetRecord(
        id=rid, title=title or "untitled", description=description, tags=list(tags)
    )


class TestPreprocess:
    def test_stop_word_removal_and_stemming(self):
        assert preprocess("Population of England") == ["popul", "england"]

    def test_empty(self):
        assert preprocess("") == []

    def test_all_stop_words(self):
        assert preprocess("the and of") == []

    def test_splits_on_punctuation(self):
        assert preprocess("road-network (2019)") == ["road", "network", "2019"]

    def test_idempotent_through_rejoin(self):
        text = "Population density projections for coastal communities"
        once = preprocess(text)
        assert preprocess(" ".join(once)) == [t for t in once]

    def test_surface_tokens_keep_unstemmed_forms(self):
        assert surface_tokens("Learning in Wales") == ["learning", "wales"]


class TestFieldWeights:
    def test_defaults(self):
        w = FieldWeights()
        assert w.for_field(Field.TITLE) == 1.0
        assert w.for_field(Field.TAGS) == 1.0
        assert w.for_field(Field.DESCRIPTION) == 0.4

    def test_description_cannot_outweigh_title(self):
        with pytest.raises(ValueError):
            FieldWeights(weight_a=0.4, weight_b=0.8)

    def test_range_enforced(self):
        with pytest.raises(ValueError):
            FieldWeights(weight_a=1.2)


class TestBuildIndex:
    def test_repeated_title_term_counts(self):
        index = build_index([record(title="parks parks")])
        doc = index.documents["d1"]
        assert doc.tf("park", Field.TITLE) == 2

    def test_empty_corpus(self):
        index = build_index([])
        assert len(index) == 0

    def test_tags_indexed_under_tags_field(self):
        index = build_index([record(title="x", tags=["transport", "bus routes"])])
        doc = index.documents["d1"]
        assert doc.tf("transport", Field.TAGS) == 1
        assert doc.tf("rout", Field.TAGS) == 1

    def test_determinism_bytes_identical(self):
        records = [
            record("a", title="Population density", description="by region"),
            record("b", title="Transport routes", tags=["bus"]),
        ]
        assert serialize_index(build_index(records)) == serialize_index(build_index(records))

    def test_save_load_round_trip(self, tmp_path):
        records = [record("a", title="Population density", description="by region")]
        index = build_index(records)
        path = tmp_path / "index.json"
        save_index(index, path)
        loaded = load_index(path)
        assert serialize_index(loaded) == serialize_index(index)

    def test_load_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bogus.json"
        path.write_text('{"magic": "nope", "version": 1}')
        with pytest.raises(ValueError):
            load_index(path)


class TestTextScore:
    def test_single_title_match(self):
        index = build_index([record(title="park")])
        doc = index.documents["d1"]
        got = text_score(doc, [("park", 1.0)], FieldWeights(1.0, 0.4))
        assert got == pytest.approx(0.5)  # 1.0 * 1.0 * 1/(1+1)

    def test_no_overlap_scores_zero(self):
        index = build_index([record(title="park")])
        doc = index.documents["d1"]
        assert text_score(doc, [("road", 1.0)], FieldWeights()) == 0.0

    def test_title_plus_description(self):
        index = build_index([record(title="park", description="park")])
        doc = index.documents["d1"]
        got = text_score(doc, [("park", 1.0)], FieldWeights(1.0, 0.4))
        assert got == pytest.approx(1.0 * 0.5 + 0.4 * 0.5)

    def test_duplicate_terms_keep_max_weight(self):
        index = build_index([record(title="park")])
        doc = index.documents["d1"]
        low_then_high = text_score(doc, [("park", 0.5), ("park", 1.0)], FieldWeights())
        assert low_then_high == pytest.approx(0.5)

    def test_monotone_in_query_weight(self):
        index = build_index([record(title="park park road")])
        doc = index.documents["d1"]
        for lo, hi in [(0.2, 0.4), (0.5, 1.0)]:
            assert text_score(doc, [("park", lo)], FieldWeights()) < text_score(
                doc, [("park", hi)], FieldWeights()
            )

    def test_monotone_in_tf(self):
        one = build_index([record(title="park")]).documents["d1"]
        two = build_index([record(title="park park")]).documents["d1"]
        w = FieldWeights()
        assert text_score(one, [("park", 1.0)], w) < text_score(two, [("park", 1.0)], w)

    @given(
        st.lists(
            st.sampled_from(["park", "road", "rail", "water", "air"]),
            min_size=0,
            max_size=8,
        )
    )
    def test_zero_score_iff_no_match(self, title_words):
        index = build_index([record(title=" ".join(title_words) or "filler")])
        doc = index.documents["d1"]
        terms = [("park", 1.0), ("rail", 0.8)]
        score = text_score(doc, terms, FieldWeights())
        assert (score == 0.0) == (not match_any(doc, [t for t, _ in terms]))


class TestMatching:
    def test_match_all_and_any(self):
        index = build_index([record(title="Population of England")])
        doc = index.documents["d1"]
        assert match_all(doc, ["popul", "england"])
        assert not match_all(doc, ["popul", "wale"])
        assert match_any(doc, ["wale", "popul"])
        assert not match_any(doc, ["wale", "scotland"])
