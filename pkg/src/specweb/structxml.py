"""Structured XML: the clean, logically nested serialization of a DocTree.

Grammar (see ``docs/structured-format.md``)::

    Book       := Block* Heading*
    Heading    := <Part|Chapter|Section|Subsection Number="..">  Body  </..>
                | <EndPart|LastPart>  Body  </..>
                | <KeywordElement>  Body  </..>      (any other element name)
    Body       := <Name>title</Name> <References>a, b</References>? Block* Heading*
    Block      := <P>  | <Figure> | <Table> | <L>
"""

from __future__ import annotations

import re
from xml.parsers import expat
from xml.sax.saxutils import escape, quoteattr

from .errors import InvalidTree, SchemaViolation
from .ingest import normalize_space
from .model import Block, DocNode, DocTree, Figure, HeadingEntry, HeadingKind, ListBlock, ListItem, Paragraph, Table
from .structure import validate_tree
from .xmlutil import Node, parse_xml

ROOT = "Book"
_KIND_BY_ELEMENT = {k.element: k for k in HeadingKind if k is not HeadingKind.KEYWORD}
BLOCK_ELEMENTS = frozenset({"P", "Figure", "Table", "L"})
RESERVED = frozenset(
    {ROOT, "Name", "References", "Keyword", "ImageData", "Caption", "TR", "TH", "TD", "LI", "LI_Label", "LI_Title"}
    | BLOCK_ELEMENTS
    | set(_KIND_BY_ELEMENT)
)


def keyword_element_name(title: str) -> str:
    """XML element name for a keyword heading (``Generalizations`` -> ``<Generalizations>``)."""
    name = re.sub(r"[^A-Za-z0-9_.\-]", "", title)
    # Names starting with "xml" (any case) are reserved by XML itself.
    if not name or not re.match(r"[A-Za-z_]", name) or name.lower().startswith("xml"):
        name = "K_" + name
    if name in RESERVED:
        name += "_"
    return name


class _Writer:
    def __init__(self):
        self.parts: list[str] = []

    def line(self, depth: int, text: str) -> None:
        self.parts.append("  " * depth + text + "\n")

    def leaf(self, depth: int, tag: str, text: str, attrs: str = "") -> None:
        self.line(depth, f"<{tag}{attrs}>{escape(text)}</{tag}>")

    def block(self, depth: int, block: Block) -> None:
        if isinstance(block, Paragraph):
            self.leaf(depth, "P", block.text)
        elif isinstance(block, Figure):
            self.line(depth, "<Figure>")
            self.line(depth + 1, f"<ImageData src={quoteattr(block.src)}/>")
            if block.caption:
                self.line(depth + 1, "<Caption>")
                self.leaf(depth + 2, "P", block.caption)
                self.line(depth + 1, "</Caption>")
            self.line(depth, "</Figure>")
        elif isinstance(block, Table):
            self.line(depth, "<Table>")
            if block.caption:
                self.line(depth + 1, "<Caption>")
                self.leaf(depth + 2, "P", block.caption)
                self.line(depth + 1, "</Caption>")
            for cell_tag, rows in (("TH", block.header_rows), ("TD", block.data_rows)):
                for row in rows:
                    if not row:
                        self.line(depth + 1, "<TR/>")
                        continue
                    self.line(depth + 1, "<TR>")
                    for cell in row:
                        self.leaf(depth + 2, cell_tag, cell)
                    self.line(depth + 1, "</TR>")
            self.line(depth, "</Table>")
        elif isinstance(block, ListBlock):
            self.list(depth, block)
        else:  # pragma: no cover - Block is a closed union
            raise TypeError(f"not a block: {block!r}")

    def list(self, depth: int, block: ListBlock) -> None:
        if not block.items:
            self.line(depth, "<L/>")
            return
        self.line(depth, "<L>")
        for item in block.items:
            self.line(depth + 1, "<LI>")
            if item.label:
                self.leaf(depth + 2, "LI_Label", item.label)
            if item.title:
                self.leaf(depth + 2, "LI_Title", item.title)
            if item.sublist is not None:
                self.list(depth + 2, item.sublist)
            self.line(depth + 1, "</LI>")
        self.line(depth, "</L>")

    def node(self, depth: int, node: DocNode) -> None:
        h = node.heading
        tag = keyword_element_name(h.title) if h.kind is HeadingKind.KEYWORD else h.kind.element
        attrs = f" Number={quoteattr(h.number)}" if h.number else ""
        self.line(depth, f"<{tag}{attrs}>")
        self.leaf(depth + 1, "Name", h.title)
        if h.references:
            self.leaf(depth + 1, "References", ", ".join(h.references))
        for b in node.blocks:
            self.block(depth + 1, b)
        for child in node.children:
            self.node(depth + 1, child)
        self.line(depth, f"</{tag}>")


def serialize_structured_xml(tree: DocTree) -> bytes:
    report = validate_tree(tree)
    if not report.ok:
        raise InvalidTree(report.violations)
    w = _Writer()
    w.parts.append('<?xml version="1.0" encoding="UTF-8"?>\n')
    if not tree.blocks and not tree.children:
        w.line(0, f"<{ROOT}/>")
    else:
        w.line(0, f"<{ROOT}>")
        for b in tree.blocks:
            w.block(1, b)
        for child in tree.children:
            w.node(1, child)
        w.line(0, f"</{ROOT}>")
    return "".join(w.parts).encode("utf-8")


# ---------------------------------------------------------------------------
# parsing


def _text(node: Node) -> str:
    return normalize_space(node.text_content())


def _check_no_text(node: Node) -> None:
    if node.own_text().strip():
        raise SchemaViolation(node.tag, node.line, "unexpected character data")


def _parse_list(node: Node) -> ListBlock:
    _check_no_text(node)
    items = []
    for li in node.elements():
        if li.tag != "LI":
            raise SchemaViolation(li.tag, li.line, "expected <LI>")
        _check_no_text(li)
        label = title = ""
        sub = None
        for part in li.elements():
            if part.tag == "LI_Label":
                label = _text(part)
            elif part.tag == "LI_Title":
                title = _text(part)
            elif part.tag == "L":
                sub = _parse_list(part)
            else:
                raise SchemaViolation(part.tag, part.line, "unexpected element in <LI>")
        items.append(ListItem(label, title, sub))
    return ListBlock(tuple(items))


def _caption(node: Node) -> str:
    return " ".join(_text(p) for p in node.elements()) if node.elements() else _text(node)


def _parse_block(node: Node) -> Block:
    if node.tag == "P":
        if node.elements():
            raise SchemaViolation(node.elements()[0].tag, node.elements()[0].line, "markup inside <P>")
        return Paragraph(_text(node))
    if node.tag == "Figure":
        _check_no_text(node)
        src, caption = None, ""
        for part in node.elements():
            if part.tag == "ImageData":
                src = part.attrs.get("src", "")
            elif part.tag == "Caption":
                caption = _caption(part)
            else:
                raise SchemaViolation(part.tag, part.line, "unexpected element in <Figure>")
        if not src:
            raise SchemaViolation("ImageData", node.line, "figure without image source")
        return Figure(src, caption)
    if node.tag == "Table":
        _check_no_text(node)
        caption = ""
        header: list[tuple[str, ...]] = []
        data: list[tuple[str, ...]] = []
        for part in node.elements():
            if part.tag == "Caption":
                caption = _caption(part)
            elif part.tag == "TR":
                _check_no_text(part)
                cells = part.elements()
                for c in cells:
                    if c.tag not in ("TH", "TD"):
                        raise SchemaViolation(c.tag, c.line, "expected <TH> or <TD>")
                texts = tuple(_text(c) for c in cells)
                if cells and all(c.tag == "TH" for c in cells):
                    header.append(texts)
                else:
                    data.append(texts)
            else:
                raise SchemaViolation(part.tag, part.line, "unexpected element in <Table>")
        return Table(caption, tuple(header), tuple(data))
    if node.tag == "L":
        return _parse_list(node)
    raise SchemaViolation(node.tag, node.line)


def _is_heading_element(node: Node) -> bool:
    if node.tag in _KIND_BY_ELEMENT:
        return True
    if node.tag in RESERVED:
        return False
    kids = node.elements()
    return bool(kids) and kids[0].tag == "Name"


def _parse_node(node: Node) -> DocNode:
    _check_no_text(node)
    kind = _KIND_BY_ELEMENT.get(node.tag, HeadingKind.KEYWORD)
    kids = node.elements()
    if not kids or kids[0].tag != "Name":
        raise SchemaViolation(node.tag, node.line, "heading element must start with <Name>")
    title = _text(kids[0])
    rest = kids[1:]
    refs: tuple[str, ...] = ()
    if rest and rest[0].tag == "References":
        refs = tuple(r.strip() for r in _text(rest[0]).split(",") if r.strip())
        rest = rest[1:]
    number = node.attrs.get("Number", "")
    heading = HeadingEntry(kind, number, title, refs, node.line)
    doc = DocNode(heading)
    _fill(doc.blocks, doc.children, rest)
    return doc


def _fill(blocks: list, children: list, elements: list[Node]) -> None:
    seen_heading = False
    for el in elements:
        if el.tag in BLOCK_ELEMENTS:
            if seen_heading:
                raise SchemaViolation(el.tag, el.line, "block after a nested heading")
            blocks.append(_parse_block(el))
        elif _is_heading_element(el):
            seen_heading = True
            children.append(_parse_node(el))
        else:
            raise SchemaViolation(el.tag, el.line)


def parse_structured_xml(data: bytes) -> DocTree:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise SchemaViolation(ROOT, None, "input is not valid UTF-8") from None
    try:
        root = parse_xml(text)
    except expat.ExpatError as exc:
        raise SchemaViolation(ROOT, exc.lineno, expat.ErrorString(exc.code)) from None
    except IndexError:
        raise SchemaViolation(ROOT, None, "no document element") from None
    if root.tag != ROOT:
        raise SchemaViolation(root.tag, root.line, f"document element must be <{ROOT}>")
    _check_no_text(root)
    tree = DocTree()
    _fill(tree.blocks, tree.children, root.elements())
    return tree
