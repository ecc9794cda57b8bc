from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specweb.errors import EmptyHeadings, EmptyReport
from specweb.model import DocNode, DocTree, HeadingEntry, HeadingKind as HK, ListBlock, ListItem, Paragraph, Table
from specweb.stats import (
    COLUMNS,
    AllHeadings,
    MinOccurrence,
    ReportRow,
    TokenizerConfig,
    document_texts,
    emit_report,
    heading_prominence,
    rank_tokens,
    tokenize,
    tree_prominence,
)

words = st.lists(st.sampled_from([f"w{i}" for i in range(30)]), min_size=1, max_size=300)


class TestTokenize:
    def test_heading(self):
        assert tokenize("7 Classes") == ["7", "classes"]

    def test_empty(self):
        assert tokenize("") == []

    def test_fixture_paragraph(self):
        text = "An AssociationClass is both an Association and a Class (see 7.3.3)."
        assert tokenize(text) == [
            "an", "associationclass", "is", "both", "an", "association", "and", "a", "class", "see", "7", "3", "3",
        ]

    def test_underscore_and_unicode(self):
        assert tokenize("snake_case Größe") == ["snake", "case", "größe"]

    def test_stopwords(self):
        assert tokenize("the Class of the Kernel", TokenizerConfig(frozenset({"the", "of"}))) == ["class", "kernel"]


class TestRanking:
    def test_small(self):
        assert rank_tokens(["a", "b", "a"]).entries == (("a", 2), ("b", 1))

    def test_all_distinct_keep_order(self):
        assert [t for t, _ in rank_tokens(["c", "a", "b"]).entries] == ["c", "a", "b"]

    @settings(max_examples=200)
    @given(words)
    def test_matches_counting_oracle(self, tokens):
        ranking = rank_tokens(tokens)
        assert dict(ranking.entries) == Counter(tokens)
        counts = [c for _, c in ranking.entries]
        assert counts == sorted(counts, reverse=True)
        for (t1, c1), (t2, c2) in zip(ranking.entries, ranking.entries[1:]):
            if c1 == c2:
                assert tokens.index(t1) < tokens.index(t2)


class TestProminence:
    def test_worked_example(self):
        doc = [f"t{i}" for i in range(10)]
        r = heading_prominence(rank_tokens(doc), {"t0", "t2"})
        assert r.positions == (1, 3) and r.mean == 2 and r.percentage == 20
        assert r.distinct_doc_tokens == 10

    def test_missing_reported(self):
        r = heading_prominence(rank_tokens(["a", "b"]), ["a", "zzz"])
        assert r.missing == ("zzz",) and r.positions == (1,)

    def test_min_occurrence_filters(self):
        doc = ["a"] * 3 + ["b"] * 2 + ["c"]
        r = heading_prominence(rank_tokens(doc), ["a", "b", "c"], MinOccurrence(2))
        assert r.positions == (1,)
        assert str(r.mode) == ">2"

    def test_empty_headings(self):
        with pytest.raises(EmptyHeadings):
            heading_prominence(rank_tokens(["a"]), ["a"], MinOccurrence(5))
        with pytest.raises(EmptyHeadings):
            heading_prominence(rank_tokens(["a"]), [])

    @settings(max_examples=200)
    @given(words, st.data())
    def test_bounds(self, doc, data):
        headings = data.draw(st.lists(st.sampled_from(doc), min_size=1, max_size=10))
        r = heading_prominence(rank_tokens(doc), headings)
        assert all(1 <= p <= r.distinct_doc_tokens for p in r.positions)
        assert 0 < r.percentage <= 100

    @settings(max_examples=200)
    @given(words, st.data())
    def test_rarer_token_appended(self, doc, data):
        headings = data.draw(st.lists(st.sampled_from(doc), min_size=1, max_size=10))
        before = heading_prominence(rank_tokens(doc), headings)
        after = heading_prominence(rank_tokens(doc + ["zz-new"]), headings)
        assert after.distinct_doc_tokens == before.distinct_doc_tokens + 1
        assert all(a >= b for a, b in zip(after.positions, before.positions))


def small_tree():
    sec = DocNode(
        HeadingEntry(HK.SECTION, "7.1", "Class Overview"),
        [Paragraph("A class has features."), Table("Table 7.1 class", (("Name",),), (("x",),)), ListBlock((ListItem("-", "class"),))],
    )
    return DocTree([Paragraph("front")], [DocNode(HeadingEntry(HK.CHAPTER, "7", "Classes"), children=[sec])])


def test_document_texts_include_headings_and_blocks():
    body, headings = document_texts(small_tree())
    assert headings == ["Classes", "Class Overview"]
    assert body == ["front", "Classes", "Class Overview", "A class has features.", "Table 7.1 class", "Name", "x", "-", "class"]


def test_tree_prominence_recomputed_by_hand():
    r = tree_prominence(small_tree())
    # class x4, then first-seen order: front classes overview a has features table 7 1 name x
    assert (r.raw_doc_tokens, r.distinct_doc_tokens) == (15, 12)
    assert r.positions == (1, 3, 4)
    assert r.mean == Fraction(8, 3)
    assert r.percentage == Fraction(200, 9)


def test_report():
    row = ReportRow("doc", 2, 1, tree_prominence(small_tree()), 3)
    lines = emit_report([row]).decode().splitlines()
    assert lines[0].split("\t") == list(COLUMNS)
    cells = dict(zip(COLUMNS, lines[1].split("\t")))
    assert cells["document"] == "doc" and cells["hypertext_pages"] == "3"
    assert cells["percentage"] == "22.2%" and cells["mode"] == str(AllHeadings())
    assert len(lines) == 2


def test_empty_report():
    with pytest.raises(EmptyReport):
        emit_report([])
