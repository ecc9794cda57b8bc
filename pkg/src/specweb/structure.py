"""Heading classification and the stack-based logical structure builder."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .ingest import EventKind, FlatEvent, RawHeadingLine
from .model import (
    Block,
    Diagnostic,
    DocNode,
    DocTree,
    Figure,
    HeadingEntry,
    HeadingKind,
    ListBlock,
    ListItem,
    Paragraph,
    Table,
    page_key,
)

logger = logging.getLogger(__name__)

# Keyword headings seen in OMG specifications (sub-subsection titles).
DEFAULT_KEYWORDS = (
    "Associations",
    "Attributes",
    "Constraints",
    "Description",
    "Generalization",
    "Generalizations",
    "Notation",
    "Semantics",
    "Operations",
    "Additional Operations",
    "Presentation Options",
    "Style Guidelines",
    "Examples",
    "Rationale",
    "Changes from previous UML",
    "Semantic Variation Points",
    "Issues",
)


@dataclass(frozen=True)
class HeadingPatternConfig:
    """Regular expressions recognizing each heading kind.

    A ``number`` named group, when present, captures the heading number; the
    rest of the line (minus leading separators) is the title.
    """

    part: str = r"^Part\s+(?P<number>[IVXLC]+)\b"
    end_part: str = r"^Annex\b"
    last_part: str = r"^Index$"
    chapter: str = r"^(?P<number>\d+)\s+(?=\S)"
    section: str = r"^(?P<number>\d+\.\d+)\s"
    subsection: str = r"^(?P<number>\d+(?:\.\d+){2,})\s"
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    _compiled: list = field(default_factory=list, init=False, repr=False, compare=False)

    def compiled(self) -> list[tuple[HeadingKind, re.Pattern]]:
        if not self._compiled:
            order = [
                (HeadingKind.PART, self.part),
                (HeadingKind.END_PART, self.end_part),
                (HeadingKind.LAST_PART, self.last_part),
                (HeadingKind.CHAPTER, self.chapter),
                (HeadingKind.SECTION, self.section),
                (HeadingKind.SUBSECTION, self.subsection),
            ]
            self._compiled.extend((kind, re.compile(p)) for kind, p in order)
        return self._compiled


DEFAULT_PATTERNS = HeadingPatternConfig()

_FROM_CLAUSE = re.compile(r"\s*\(\s*from\s+([^()]*)\)\s*$")
_LEADING_SEPARATORS = re.compile(r"^[\s\-–—:.]+")


def split_references(text: str) -> tuple[str, tuple[str, ...]]:
    """Strip a trailing ``(from A, B)`` clause, returning the rest and the names."""
    m = _FROM_CLAUSE.search(text)
    if not m:
        return text, ()
    refs = tuple(r.strip() for r in m.group(1).split(",") if r.strip())
    return text[: m.start()].rstrip(), refs


def classify_heading(line: RawHeadingLine, patterns: HeadingPatternConfig = DEFAULT_PATTERNS) -> HeadingEntry:
    text = " ".join(line.text.split())
    body, refs = split_references(text)
    for kind, pattern in patterns.compiled():
        m = pattern.match(body)
        if m is None:
            continue
        if kind in (HeadingKind.END_PART, HeadingKind.LAST_PART):
            return HeadingEntry(kind, "", body, refs, line.line_no, line.index)
        if "number" in pattern.groupindex:
            number = m.group("number")
        else:
            number = m.group(0).strip()
        title = _LEADING_SEPARATORS.sub("", body[m.end():])
        return HeadingEntry(kind, number, title, refs, line.line_no, line.index)
    known = body in patterns.keywords
    return HeadingEntry(HeadingKind.KEYWORD, "", body, refs, line.line_no, line.index, unmatched=not known)


# ---------------------------------------------------------------------------
# content blocks


def _list_from(events: Sequence[FlatEvent], i: int) -> tuple[ListBlock, int]:
    """Parse a list starting at events[i] (a ListStart); return it and the index after ListEnd."""
    assert events[i].kind is EventKind.LIST_START
    i += 1
    items: list[ListItem] = []
    while i < len(events) and events[i].kind is not EventKind.LIST_END:
        ev = events[i]
        if ev.kind is not EventKind.ITEM_START:
            i += 1
            continue
        i += 1
        labels: list[str] = []
        titles: list[str] = []
        sublist = None
        while i < len(events) and events[i].kind is not EventKind.ITEM_END:
            ev = events[i]
            if ev.kind is EventKind.ITEM_LABEL:
                labels.append(ev.text)
            elif ev.kind is EventKind.ITEM_TITLE:
                titles.append(ev.text)
            elif ev.kind is EventKind.LIST_START:
                nested, i = _list_from(events, i)
                if sublist is None:
                    sublist = nested
                else:
                    sublist = ListBlock(sublist.items + nested.items)
                continue
            i += 1
        items.append(ListItem(" ".join(labels), " ".join(t for t in titles if t), sublist))
        i += 1
    return ListBlock(tuple(items)), i + 1


def blocks_from_events(events: Sequence[FlatEvent]) -> list[Block]:
    """Group a run of content events into blocks."""
    blocks: list[Block] = []
    i = 0
    n = len(events)
    while i < n:
        ev = events[i]
        kind = ev.kind
        if kind is EventKind.PARA_START:
            texts = []
            i += 1
            while i < n and events[i].kind is not EventKind.PARA_END:
                if events[i].kind is EventKind.TEXT:
                    texts.append(events[i].text)
                i += 1
            blocks.append(Paragraph(" ".join(texts)))
            i += 1
        elif kind is EventKind.FIGURE_START:
            srcs: list[str] = []
            captions: list[str] = []
            i += 1
            while i < n and events[i].kind is not EventKind.FIGURE_END:
                e = events[i]
                if e.kind is EventKind.IMAGE_DATA and e.src:
                    srcs.append(e.src)
                elif e.kind is EventKind.TEXT:
                    captions.append(e.text)
                i += 1
            caption = " ".join(captions)
            if not srcs:
                if caption:
                    blocks.append(Paragraph(caption))
            else:
                blocks.extend(Figure(s) for s in srcs[:-1])
                blocks.append(Figure(srcs[-1], caption))
            i += 1
        elif kind is EventKind.TABLE_START:
            captions = []
            header_rows: list[tuple[str, ...]] = []
            data_rows: list[tuple[str, ...]] = []
            row: list[EventKind | str] = []
            i += 1
            while i < n and events[i].kind is not EventKind.TABLE_END:
                e = events[i]
                if e.kind is EventKind.TABLE_CAPTION:
                    if e.text:
                        captions.append(e.text)
                elif e.kind is EventKind.ROW_START:
                    cells: list[FlatEvent] = []
                    i += 1
                    while i < n and events[i].kind is not EventKind.ROW_END:
                        if events[i].kind in (EventKind.HEADER_CELL, EventKind.DATA_CELL):
                            cells.append(events[i])
                        i += 1
                    texts = tuple(c.text for c in cells)
                    if cells and all(c.kind is EventKind.HEADER_CELL for c in cells):
                        header_rows.append(texts)
                    else:
                        data_rows.append(texts)
                i += 1
            blocks.append(Table(" ".join(captions), tuple(header_rows), tuple(data_rows)))
            i += 1
        elif kind is EventKind.LIST_START:
            lst, i = _list_from(events, i)
            blocks.append(lst)
        else:
            # Stray text outside any container still belongs to the document.
            if kind is EventKind.TEXT and ev.text:
                blocks.append(Paragraph(ev.text))
            i += 1
    return blocks


# ---------------------------------------------------------------------------
# tree building


def _heading_span(events: Sequence[FlatEvent], index: int) -> int:
    """Index just past the heading paragraph that starts at ``index``."""
    i = index + 1
    while i < len(events) and events[i].kind is not EventKind.PARA_END:
        i += 1
    return i + 1


def build_tree(
    queue: Sequence[HeadingEntry],
    events: Sequence[FlatEvent] = (),
    trace: Callable[[str, HeadingEntry], None] | None = None,
) -> DocTree:
    """Rebuild the heading tree from the ordered heading queue.

    An incoming heading pops (closes) every open heading whose rank is greater
    than or equal to its own, then is pushed (opened) under whatever remains.
    Content events between two headings become blocks of the first.  ``trace``
    receives ``("open", entry)`` / ``("close", entry)`` in execution order.
    """
    tree = DocTree()
    stack: list[DocNode] = []

    def close():
        node = stack.pop()
        if trace:
            trace("close", node.heading)

    for entry in queue:
        while stack and entry.kind <= stack[-1].heading.kind:
            close()
        node = DocNode(entry)
        (stack[-1].children if stack else tree.children).append(node)
        stack.append(node)
        if trace:
            trace("open", entry)
        if entry.unmatched:
            tree.diagnostics.append(
                Diagnostic(entry.source_line, f"heading {entry.title!r} matched no pattern; treated as keyword")
            )
    while stack:
        close()

    if events:
        _attach_blocks(tree, queue, events)
    _check_numbering(tree)
    return tree


def _attach_blocks(tree: DocTree, queue: Sequence[HeadingEntry], events: Sequence[FlatEvent]) -> None:
    nodes = list(tree.walk())
    starts = [h.index for h in queue]
    if any(s < 0 for s in starts):
        tree.blocks = blocks_from_events(events)
        return
    first = starts[0] if starts else len(events)
    tree.blocks = blocks_from_events(events[:first])
    for k, node in enumerate(nodes):
        begin = _heading_span(events, starts[k])
        end = starts[k + 1] if k + 1 < len(starts) else len(events)
        node.blocks = blocks_from_events(events[begin:end])


def _number_tail(number: str) -> tuple[str, int] | None:
    head, _, tail = number.rpartition(".")
    return (head, int(tail)) if tail.isdigit() else None


def _check_numbering(tree: DocTree) -> None:
    siblings_lists = [tree.children] + [n.children for n in tree.walk()]
    for siblings in siblings_lists:
        prev = None
        for node in siblings:
            h = node.heading
            if h.kind not in (HeadingKind.CHAPTER, HeadingKind.SECTION, HeadingKind.SUBSECTION):
                continue
            cur = _number_tail(h.number)
            if prev is not None and cur is not None:
                ph, pn = prev[1]
                if cur[0] == ph and prev[0] is h.kind and cur[1] != pn + 1:
                    tree.diagnostics.append(
                        Diagnostic(h.source_line, f"non-contiguous numbering: {prev[2]} followed by {h.number}")
                    )
            prev = (h.kind, cur, h.number) if cur is not None else None


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    lines: tuple[int, ...] = ()

    def __str__(self) -> str:
        where = f" (line {', '.join(map(str, self.lines))})" if any(self.lines) else ""
        return f"{self.rule}: {self.message}{where}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __len__(self) -> int:
        return len(self.violations)


_DOTTED = re.compile(r"^\d+(?:\.\d+)+$")


def validate_tree(tree: DocTree) -> ValidationReport:
    """Check rank ordering, number prefixes and duplicate page numbers."""
    report = ValidationReport()
    add = report.violations.append
    seen: dict[str, HeadingEntry] = {}
    for parent, node in tree.walk_with_parent():
        h = node.heading
        if parent is not None and h.kind <= parent.heading.kind:
            add(
                Violation(
                    "rank",
                    f"{h.kind.name} {h.label!r} nested under {parent.heading.kind.name} {parent.heading.label!r}",
                    (h.source_line,),
                )
            )
        if h.kind.is_numbered != bool(h.number):
            add(Violation("number", f"{h.kind.name} {h.label!r} has an unexpected number field", (h.source_line,)))
        if h.kind in (HeadingKind.SECTION, HeadingKind.SUBSECTION):
            if not _DOTTED.match(h.number):
                add(Violation("number", f"{h.number!r} is not a dotted number", (h.source_line,)))
            elif parent is not None and parent.heading.kind in (
                HeadingKind.CHAPTER,
                HeadingKind.SECTION,
                HeadingKind.SUBSECTION,
            ):
                if not h.number.startswith(parent.heading.number + "."):
                    add(
                        Violation(
                            "prefix",
                            f"{h.number} does not extend its parent's number {parent.heading.number}",
                            (h.source_line,),
                        )
                    )
        if h.kind.is_structural:
            key = page_key(h)
            if key in seen:
                first = seen[key]
                add(
                    Violation(
                        "duplicate",
                        f"page {key!r} used by both {first.label!r} and {h.label!r}",
                        (first.source_line, h.source_line),
                    )
                )
            else:
                seen[key] = h
    return report
