import pytest
from hypothesis import given, settings

from specweb.ingest import RawHeadingLine
from specweb.model import DocNode, DocTree, HeadingEntry, HeadingKind as HK, ListBlock, Paragraph, Table
from specweb.pipeline import extract_tree
from specweb.structure import (
    HeadingPatternConfig,
    build_tree,
    classify_heading,
    validate_tree,
)

from treegen import heading_queue


def classify(text: str, patterns: HeadingPatternConfig | None = None) -> HeadingEntry:
    line = RawHeadingLine(1, "LinkTarget_1", text)
    return classify_heading(line, patterns) if patterns else classify_heading(line)


def shape(nodes):
    return [(n.heading.label, shape(n.children)) for n in nodes]


class TestClassify:
    @pytest.mark.parametrize(
        "text, kind, number, title",
        [
            ("Part I - Structure", HK.PART, "I", "Structure"),
            ("7 Classes", HK.CHAPTER, "7", "Classes"),
            ("7.3 Class Descriptions", HK.SECTION, "7.3", "Class Descriptions"),
            ("7.3.1 Abstraction", HK.SUBSECTION, "7.3.1", "Abstraction"),
            ("7.3.1.2 Deeper", HK.SUBSECTION, "7.3.1.2", "Deeper"),
            ("Generalization", HK.KEYWORD, "", "Generalization"),
            ("Annex A - XMI Serialization", HK.END_PART, "", "Annex A - XMI Serialization"),
            ("Index", HK.LAST_PART, "", "Index"),
        ],
    )
    def test_table_of_kinds(self, text, kind, number, title):
        h = classify(text)
        assert (h.kind, h.number, h.title) == (kind, number, title)
        assert not h.unmatched

    def test_from_clause(self):
        h = classify("9.3.1 Class (from StructuredClasses)")
        assert (h.kind, h.title, h.references) == (HK.SUBSECTION, "Class", ("StructuredClasses",))

    def test_from_clause_several(self):
        h = classify("8.2.1 Component (from BasicComponents, PackagingComponents)")
        assert h.references == ("BasicComponents", "PackagingComponents")

    def test_unmatched_falls_back_to_keyword(self):
        h = classify("Something odd")
        assert h.kind is HK.KEYWORD and h.unmatched

    def test_custom_patterns(self):
        patterns = HeadingPatternConfig(chapter=r"^Chapter\s+(?P<number>\d+)\s", keywords=("Usage",))
        assert classify("Chapter 3 Setup", patterns).number == "3"
        assert not classify("Usage", patterns).unmatched


def q(*specs):
    kinds = {"P": HK.PART, "C": HK.CHAPTER, "S": HK.SECTION, "SS": HK.SUBSECTION, "K": HK.KEYWORD}
    out = []
    for i, spec in enumerate(specs):
        code, _, rest = spec.partition(":")
        kind = kinds[code]
        number = rest if kind is not HK.KEYWORD else ""
        out.append(HeadingEntry(kind, number, rest if kind is HK.KEYWORD else f"t{i}", index=i))
    return out


class TestBuildTree:
    def test_equal_rank_is_sibling(self):
        tree = build_tree(q("S:7.3", "SS:7.3.1", "SS:7.3.2", "S:7.4"))
        assert shape(tree.children) == [
            ("7.3 t0", [("7.3.1 t1", []), ("7.3.2 t2", [])]),
            ("7.4 t3", []),
        ]

    def test_keyword_popped_by_section(self):
        tree = build_tree(q("P:I", "C:7", "S:7.1", "K:Notation", "S:7.2"))
        assert shape(tree.children) == [
            ("I t0", [("7 t1", [("7.1 t2", [("Notation", [])]), ("7.2 t4", [])])]),
        ]

    def test_empty_queue_keeps_front_matter(self):
        tree = extract_tree(b"<Document><P>only text</P></Document>")
        assert tree.children == [] and tree.blocks == [Paragraph("only text")]

    def test_trace_order(self):
        log = []
        build_tree(q("C:1", "S:1.1", "C:2"), trace=lambda op, h: log.append((op, h.number)))
        assert log == [("open", "1"), ("open", "1.1"), ("close", "1.1"), ("close", "1"), ("open", "2"), ("close", "2")]

    @settings(max_examples=300, deadline=None)
    @given(heading_queue(max_size=120))
    def test_output_always_rank_valid(self, queue):
        tree = build_tree(queue)
        assert not [v for v in validate_tree(tree).violations if v.rule == "rank"]

    def test_blocks_attach_to_preceding_heading(self):
        raw = b"""<Document>
<P>front</P>
<P id="LinkTarget_1">7 Classes</P>
<P>chapter body</P>
<Table><TR><TD>a</TD><TD>b</TD></TR></Table>
<P id="LinkTarget_2">7.1 Overview</P>
<L><LI><LI_Title>x</LI_Title></LI></L>
</Document>"""
        tree = extract_tree(raw)
        ch = tree.children[0]
        assert tree.blocks == [Paragraph("front")]
        assert ch.blocks == [Paragraph("chapter body"), Table("", (), (("a", "b"),))]
        assert isinstance(ch.children[0].blocks[0], ListBlock)

    def test_gap_in_numbering_is_diagnosed(self):
        raw = b'<Document><P id="LinkTarget_1">7 C</P><P id="LinkTarget_2">7.3 A</P><P id="LinkTarget_3">7.5 B</P></Document>'
        tree = extract_tree(raw)
        assert any("7.3 followed by 7.5" in d.message for d in tree.diagnostics)
        assert all(d.line for d in tree.diagnostics)

    def test_unmatched_heading_is_diagnosed_with_line(self):
        tree = extract_tree(b'<Document>\n<P id="LinkTarget_1">Odd heading</P>\n</Document>')
        assert [d.line for d in tree.diagnostics] == [2]


def node(kind, number, title="t", line=0, children=()):
    return DocNode(HeadingEntry(kind, number, title, source_line=line), children=list(children))


class TestValidate:
    def test_valid_tree(self):
        tree = DocTree(children=[node(HK.CHAPTER, "7", children=[node(HK.SECTION, "7.1")])])
        assert validate_tree(tree).ok

    def test_rank_violation(self):
        tree = DocTree(children=[node(HK.SECTION, "7.1", children=[node(HK.CHAPTER, "8")])])
        report = validate_tree(tree)
        assert [v.rule for v in report.violations] == ["rank"]

    def test_duplicate_numbers_name_both_lines(self):
        tree = DocTree(children=[node(HK.CHAPTER, "7", children=[node(HK.SECTION, "7.3", line=10), node(HK.SECTION, "7.3", line=20)])])
        dupes = [v for v in validate_tree(tree).violations if v.rule == "duplicate"]
        assert len(dupes) == 1 and dupes[0].lines == (10, 20)

    def test_prefix_violation(self):
        tree = DocTree(children=[node(HK.CHAPTER, "7", children=[node(HK.SECTION, "8.1")])])
        assert [v.rule for v in validate_tree(tree).violations] == ["prefix"]

    def test_keyword_with_number(self):
        tree = DocTree(children=[node(HK.KEYWORD, "3")])
        assert [v.rule for v in validate_tree(tree).violations] == ["number"]
