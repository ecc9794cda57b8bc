"""Reading the flat, presentation-oriented tag stream produced by PDF export.

The accepted vocabulary is deliberately closed: ``P``, ``Figure``/``ImageData``/
``Caption``, ``Table``/``TR``/``TH``/``TD`` and ``L``/``LI``/``LI_Label``/``LI_Title``.
Any other element is a transparent container when it holds block content and
degrades to paragraph text otherwise.  See ``docs/flat-format.md``.
"""

from __future__ import annotations

import bisect
import enum
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence
from xml.parsers import expat
from xml.sax.saxutils import escape, quoteattr

from .errors import MalformedInput, UnrecoverableMarkup
from .xmlutil import Node, parse_xml

logger = logging.getLogger(__name__)

DEFAULT_MARKER = "LinkTarget"

VOCABULARY = frozenset(
    {"P", "Figure", "ImageData", "Caption", "Table", "TR", "TH", "TD", "L", "LI", "LI_Label", "LI_Title"}
)
BLOCK_TAGS = frozenset({"P", "Figure", "ImageData", "Table", "L"})

_WRAPPER = "__flat__"


class EventKind(enum.Enum):
    PARA_START = "ParaStart"
    PARA_END = "ParaEnd"
    TEXT = "Text"
    FIGURE_START = "FigureStart"
    IMAGE_DATA = "ImageData"
    CAPTION_START = "CaptionStart"
    CAPTION_END = "CaptionEnd"
    FIGURE_END = "FigureEnd"
    TABLE_START = "TableStart"
    TABLE_CAPTION = "TableCaption"
    ROW_START = "RowStart"
    HEADER_CELL = "HeaderCell"
    DATA_CELL = "DataCell"
    ROW_END = "RowEnd"
    TABLE_END = "TableEnd"
    LIST_START = "ListStart"
    ITEM_START = "ItemStart"
    ITEM_LABEL = "ItemLabel"
    ITEM_TITLE = "ItemTitle"
    ITEM_END = "ItemEnd"
    LIST_END = "ListEnd"


_OPENERS = {
    EventKind.PARA_START: EventKind.PARA_END,
    EventKind.FIGURE_START: EventKind.FIGURE_END,
    EventKind.CAPTION_START: EventKind.CAPTION_END,
    EventKind.TABLE_START: EventKind.TABLE_END,
    EventKind.ROW_START: EventKind.ROW_END,
    EventKind.LIST_START: EventKind.LIST_END,
    EventKind.ITEM_START: EventKind.ITEM_END,
}


@dataclass(frozen=True)
class FlatEvent:
    kind: EventKind
    text: str = ""
    attrs: tuple[tuple[str, str], ...] = ()
    line: int = field(default=0, compare=False)

    def attr(self, name: str, default: str | None = None) -> str | None:
        for key, value in self.attrs:
            if key == name:
                return value
        return default

    @property
    def src(self) -> str | None:
        return self.attr("src")

    def __repr__(self) -> str:
        inner = repr(self.text) if self.text else ""
        if self.attrs:
            inner += (", " if inner else "") + repr(dict(self.attrs))
        return f"{self.kind.value}({inner})"


@dataclass(frozen=True)
class RawHeadingLine:
    line_no: int
    id: str
    text: str
    index: int = field(default=-1, compare=False)


def normalize_space(text: str) -> str:
    return " ".join(text.split())


# ---------------------------------------------------------------------------
# sanitizing

_NAME = r"[A-Za-z_:][\w.:\-]*"
_ATTR = r"""\s+[A-Za-z_:][\w.:\-]*\s*=\s*(?:"[^"<]*"|'[^'<]*')"""
_MARKUP = re.compile(
    r"<!--.*?-->"
    r"|<!\[CDATA\[.*?\]\]>"
    r"|<\?.*?\?>"
    r"|<!DOCTYPE[^<>]*>"
    rf"|<(?P<close>/)(?P<cname>{_NAME})\s*>"
    rf"|<(?P<oname>{_NAME})(?:{_ATTR})*\s*(?P<empty>/)?>",
    re.S,
)
_ENTITY = re.compile(r"&(?:#\d+|#x[0-9a-fA-F]+|lt|gt|amp|quot|apos);")
_SPECIAL = re.compile(r"[<>&]")
_BAD_CHARS = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f￾￿]")


def _decode(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise MalformedInput(line, "input is not valid UTF-8") from None


class _LineIndex:
    def __init__(self, text: str):
        self._breaks = [m.start() for m in re.finditer("\n", text)]

    def line(self, pos: int) -> int:
        return bisect.bisect_left(self._breaks, pos) + 1


def sanitize_stream(raw: bytes) -> bytes:
    """Escape stray ``<``, ``>`` and ``&`` so the stream parses as XML.

    Anything with tag syntax is kept as markup; lone brackets (``a < b``) are
    escaped.  Characters XML 1.0 forbids are dropped.  Raises
    :class:`UnrecoverableMarkup` with the offending line when the kept tags
    do not balance.
    """
    text = _BAD_CHARS.sub("", _decode(raw))
    lines = _LineIndex(text)
    out: list[str] = []
    stack: list[tuple[str, int]] = []
    pos = 0
    while True:
        m = _SPECIAL.search(text, pos)
        if m is None:
            out.append(text[pos:])
            break
        i = m.start()
        out.append(text[pos:i])
        ch = text[i]
        if ch == "<":
            tag = _MARKUP.match(text, i)
            if tag is None:
                out.append("&lt;")
                pos = i + 1
                continue
            if tag.group("cname"):
                name = tag.group("cname")
                if not stack or stack[-1][0] != name:
                    hint = f"; <{stack[-1][0]}> from line {stack[-1][1]} is still open" if stack else ""
                    raise UnrecoverableMarkup(lines.line(i), f"unexpected </{name}>{hint}")
                stack.pop()
            elif tag.group("oname") and not tag.group("empty"):
                stack.append((tag.group("oname"), lines.line(i)))
            out.append(tag.group(0))
            pos = tag.end()
        elif ch == ">":
            out.append("&gt;")
            pos = i + 1
        else:
            ent = _ENTITY.match(text, i)
            if ent:
                out.append(ent.group(0))
                pos = ent.end()
            else:
                out.append("&amp;")
                pos = i + 1
    if stack:
        name, line = stack[-1]
        raise UnrecoverableMarkup(line, f"<{name}> is never closed")
    clean = "".join(out)
    _build_tree(clean)  # final well-formedness check; raises UnrecoverableMarkup
    return clean.encode("utf-8")


# ---------------------------------------------------------------------------
# parsing


_PROLOG = re.compile(r"\A\s*(?:<\?xml[^>]*\?>)?\s*(?:<!DOCTYPE[^<>]*>)?", re.S)


def _build_tree(text: str) -> Node:
    m = _PROLOG.match(text)
    body = text[m.end():] if m else text
    # Prolog lines are blanked, not removed, so expat line numbers stay true.
    padding = "\n" * text[: len(text) - len(body)].count("\n")
    try:
        return parse_xml(f"<{_WRAPPER}>{padding}{body}</{_WRAPPER}>")
    except expat.ExpatError as exc:
        raise UnrecoverableMarkup(exc.lineno, expat.ErrorString(exc.code)) from None


def _attrs(node: Node) -> tuple[tuple[str, str], ...]:
    return tuple(sorted(node.attrs.items()))


class _Emitter:
    def __init__(self):
        self.events: list[FlatEvent] = []

    def add(self, kind: EventKind, text: str = "", attrs=(), line: int = 0):
        self.events.append(FlatEvent(kind, text, tuple(attrs), line))

    def block(self, node: Node) -> None:
        if node.tag == "Figure":
            self.figure(node)
        elif node.tag == "ImageData":
            self.add(EventKind.FIGURE_START, line=node.line)
            self.image(node)
            self.add(EventKind.FIGURE_END, line=node.line)
        elif node.tag == "Table":
            self.table(node)
        elif node.tag == "L":
            self.add(EventKind.LIST_START, attrs=_attrs(node), line=node.line)
            self.list_items(node)
            self.add(EventKind.LIST_END, line=node.line)
        else:
            self.container(node)

    def container(self, node: Node) -> None:
        """A ``P`` or unknown element: text becomes paragraphs, blocks are hoisted."""
        buf: list[str] = []
        attrs = _attrs(node) if node.tag != _WRAPPER else ()
        line = node.line

        def flush():
            nonlocal attrs, line
            text = normalize_space("".join(buf))
            buf.clear()
            if text:
                self.add(EventKind.PARA_START, attrs=attrs, line=line)
                self.add(EventKind.TEXT, text, line=line)
                self.add(EventKind.PARA_END, line=line)
                attrs = ()

        for child in node.children:
            if isinstance(child, str):
                buf.append(child)
            elif child.tag in BLOCK_TAGS or child.has_descendant(BLOCK_TAGS):
                flush()
                self.block(child)
                line = child.line
            else:
                buf.append(child.text_content())
        flush()

    def image(self, node: Node) -> None:
        src = node.attrs.get("src", "").strip()
        if not src:
            logger.warning("line %d: <ImageData> without src ignored", node.line)
            return
        self.add(EventKind.IMAGE_DATA, attrs=_attrs(node), line=node.line)

    def figure(self, node: Node) -> None:
        self.add(EventKind.FIGURE_START, attrs=_attrs(node), line=node.line)
        stray: list[str] = []
        for child in node.children:
            if isinstance(child, str):
                stray.append(child)
            elif child.tag == "ImageData":
                self.image(child)
            elif child.tag == "Caption":
                self.caption(child.text_content(), child.line)
            else:
                stray.append(child.text_content())
        self.caption("".join(stray), node.line, required=False)
        self.add(EventKind.FIGURE_END, line=node.line)

    def caption(self, raw: str, line: int, required: bool = True) -> None:
        text = normalize_space(raw)
        if not text and not required:
            return
        self.add(EventKind.CAPTION_START, line=line)
        if text:
            self.add(EventKind.TEXT, text, line=line)
        self.add(EventKind.CAPTION_END, line=line)

    def table(self, node: Node) -> None:
        self.add(EventKind.TABLE_START, attrs=_attrs(node), line=node.line)
        self._table_content(node)
        self.add(EventKind.TABLE_END, line=node.line)

    def _table_content(self, node: Node) -> None:
        for child in node.children:
            if isinstance(child, str):
                text = normalize_space(child)
                if text:
                    self.add(EventKind.TABLE_CAPTION, text, line=node.line)
            elif child.tag == "Caption":
                self.add(EventKind.TABLE_CAPTION, normalize_space(child.text_content()), line=child.line)
            elif child.tag == "TR":
                self.row(child)
            else:
                self._table_content(child)

    def row(self, node: Node) -> None:
        self.add(EventKind.ROW_START, line=node.line)
        for child in node.children:
            if isinstance(child, str):
                text = normalize_space(child)
                if text:
                    self.add(EventKind.DATA_CELL, text, line=node.line)
                continue
            kind = EventKind.HEADER_CELL if child.tag == "TH" else EventKind.DATA_CELL
            self.add(kind, normalize_space(child.text_content()), line=child.line)
        self.add(EventKind.ROW_END, line=node.line)

    def list_items(self, node: Node) -> None:
        items: list[list[FlatEvent]] = []
        for child in node.children:
            if isinstance(child, str):
                text = normalize_space(child)
                if text:
                    items.append([FlatEvent(EventKind.ITEM_TITLE, text, (), node.line)])
            elif child.tag == "L":
                if not items:
                    items.append([])
                items[-1].extend(self._sublist(child))
            elif child.tag == "LI":
                items.append(self._item(child))
            else:
                items.append(self._item(child))
        for body in items:
            self.add(EventKind.ITEM_START, line=node.line)
            self.events.extend(body)
            self.add(EventKind.ITEM_END, line=node.line)

    def _sublist(self, node: Node) -> list[FlatEvent]:
        sub = _Emitter()
        sub.block(node)
        return sub.events

    def _item(self, node: Node) -> list[FlatEvent]:
        out: list[FlatEvent] = []
        stray: list[str] = []

        def flush():
            text = normalize_space("".join(stray))
            stray.clear()
            if text:
                out.append(FlatEvent(EventKind.ITEM_TITLE, text, (), node.line))

        for child in node.children:
            if isinstance(child, str):
                stray.append(child)
            elif child.tag == "LI_Label":
                flush()
                out.append(FlatEvent(EventKind.ITEM_LABEL, normalize_space(child.text_content()), (), child.line))
            elif child.tag == "LI_Title":
                flush()
                out.append(FlatEvent(EventKind.ITEM_TITLE, normalize_space(child.text_content()), (), child.line))
            elif child.tag == "L":
                flush()
                out.extend(self._sublist(child))
            elif child.has_descendant(BLOCK_TAGS):
                flush()
                out.extend(self._item(child))
            else:
                stray.append(child.text_content())
        flush()
        return out


def parse_flat_stream(clean: bytes) -> list[FlatEvent]:
    """Turn a sanitized flat stream into its event sequence (document order)."""
    text = _decode(clean)
    if not text.strip():
        return []
    try:
        root = _build_tree(text)
    except UnrecoverableMarkup as exc:
        raise MalformedInput(exc.position, exc.reason) from None
    emitter = _Emitter()
    emitter.container(root)
    return emitter.events


def check_balance(events: Sequence[FlatEvent]) -> None:
    """Raise :class:`MalformedInput` if start/end events do not pair up."""
    closers = set(_OPENERS.values())
    stack: list[FlatEvent] = []
    for ev in events:
        if ev.kind in _OPENERS:
            stack.append(ev)
        elif ev.kind in closers:
            if not stack or _OPENERS[stack[-1].kind] is not ev.kind:
                raise MalformedInput(ev.line, f"unexpected {ev.kind.value}")
            stack.pop()
    if stack:
        raise MalformedInput(stack[-1].line, f"{stack[-1].kind.value} never closed")


def serialize_flat_events(events: Iterable[FlatEvent]) -> bytes:
    """Write events back out in the flat vocabulary, wrapped in ``<Document>``."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>\n<Document>\n']
    context: list[EventKind] = []

    def attrs(ev: FlatEvent) -> str:
        return "".join(f" {k}={quoteattr(v)}" for k, v in ev.attrs)

    for ev in events:
        k = ev.kind
        if k is EventKind.PARA_START:
            out.append(f"<P{attrs(ev)}>")
        elif k is EventKind.PARA_END:
            out.append("</P>\n")
        elif k is EventKind.TEXT:
            if context and context[-1] is EventKind.CAPTION_START:
                out.append(f"<P>{escape(ev.text)}</P>")
            else:
                out.append(escape(ev.text))
        elif k is EventKind.FIGURE_START:
            out.append(f"<Figure{attrs(ev)}>")
        elif k is EventKind.IMAGE_DATA:
            out.append(f"<ImageData{attrs(ev)}/>")
        elif k is EventKind.CAPTION_START:
            context.append(k)
            out.append("<Caption>")
        elif k is EventKind.CAPTION_END:
            context.pop()
            out.append("</Caption>")
        elif k is EventKind.FIGURE_END:
            out.append("</Figure>\n")
        elif k is EventKind.TABLE_START:
            out.append(f"<Table{attrs(ev)}>")
        elif k is EventKind.TABLE_CAPTION:
            out.append(f"<Caption><P>{escape(ev.text)}</P></Caption>")
        elif k is EventKind.ROW_START:
            out.append("<TR>")
        elif k is EventKind.HEADER_CELL:
            out.append(f"<TH>{escape(ev.text)}</TH>")
        elif k is EventKind.DATA_CELL:
            out.append(f"<TD>{escape(ev.text)}</TD>")
        elif k is EventKind.ROW_END:
            out.append("</TR>")
        elif k is EventKind.TABLE_END:
            out.append("</Table>\n")
        elif k is EventKind.LIST_START:
            out.append(f"<L{attrs(ev)}>")
        elif k is EventKind.ITEM_START:
            out.append("<LI>")
        elif k is EventKind.ITEM_LABEL:
            out.append(f"<LI_Label>{escape(ev.text)}</LI_Label>")
        elif k is EventKind.ITEM_TITLE:
            out.append(f"<LI_Title>{escape(ev.text)}</LI_Title>")
        elif k is EventKind.ITEM_END:
            out.append("</LI>")
        elif k is EventKind.LIST_END:
            out.append("</L>\n")
    out.append("</Document>\n")
    return "".join(out).encode("utf-8")


_NUMBER_ONLY = re.compile(r"^(?:Part\s+[IVXLC]+|\d+(?:\.\d+)*)\.?$")


def collect_heading_queue(events: Sequence[FlatEvent], marker: str = DEFAULT_MARKER) -> list[RawHeadingLine]:
    """Return the marked paragraphs (``id`` containing ``marker``) in document order."""
    if not marker:
        raise ValueError("heading marker must be non-empty")
    queue: list[RawHeadingLine] = []
    for i, ev in enumerate(events):
        if ev.kind is not EventKind.PARA_START:
            continue
        ident = ev.attr("id")
        if ident is None or marker not in ident:
            continue
        text = ""
        if i + 1 < len(events) and events[i + 1].kind is EventKind.TEXT:
            text = events[i + 1].text.strip()
        if _NUMBER_ONLY.match(text):
            logger.warning("line %d: heading %r has no title; it may span several paragraphs", ev.line, text)
        queue.append(RawHeadingLine(ev.line, ident, text, i))
    return queue
