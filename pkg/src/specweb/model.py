"""Logical document model: headings, content blocks and the heading tree."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Union


class HeadingKind(enum.IntEnum):
    """Heading rank; the stack pops while the incoming rank is <= the top's."""

    PART = 1
    CHAPTER = 2
    SECTION = 3
    SUBSECTION = 4
    KEYWORD = 5
    END_PART = 6
    LAST_PART = 7

    @property
    def element(self) -> str:
        return _ELEMENT_NAMES[self]

    @property
    def is_structural(self) -> bool:
        """True for headings that get a page of their own."""
        return self is not HeadingKind.KEYWORD

    @property
    def is_numbered(self) -> bool:
        return self in (HeadingKind.PART, HeadingKind.CHAPTER, HeadingKind.SECTION, HeadingKind.SUBSECTION)


_ELEMENT_NAMES = {
    HeadingKind.PART: "Part",
    HeadingKind.CHAPTER: "Chapter",
    HeadingKind.SECTION: "Section",
    HeadingKind.SUBSECTION: "Subsection",
    HeadingKind.KEYWORD: "Keyword",
    HeadingKind.END_PART: "EndPart",
    HeadingKind.LAST_PART: "LastPart",
}


@dataclass(frozen=True)
class HeadingEntry:
    kind: HeadingKind
    number: str
    title: str
    references: tuple[str, ...] = ()
    source_line: int = field(default=0, compare=False)
    index: int = field(default=-1, compare=False)
    unmatched: bool = field(default=False, compare=False)

    @property
    def label(self) -> str:
        return f"{self.number} {self.title}" if self.number else self.title


def page_key(heading: HeadingEntry) -> str:
    """Stem of the page filename: the number, or a slug of the title for annex-like pages."""
    if heading.number:
        return heading.number
    return re.sub(r"[^A-Za-z0-9]+", "-", heading.title).strip("-") or "page"


@dataclass(frozen=True)
class Paragraph:
    text: str


@dataclass(frozen=True)
class Figure:
    src: str
    caption: str = ""


@dataclass(frozen=True)
class Table:
    caption: str = ""
    header_rows: tuple[tuple[str, ...], ...] = ()
    data_rows: tuple[tuple[str, ...], ...] = ()

    @property
    def width(self) -> int:
        return max((len(r) for r in self.header_rows + self.data_rows), default=0)


@dataclass(frozen=True)
class ListItem:
    label: str = ""
    title: str = ""
    sublist: "ListBlock | None" = None


@dataclass(frozen=True)
class ListBlock:
    items: tuple[ListItem, ...] = ()

    @property
    def depth(self) -> int:
        inner = [it.sublist.depth for it in self.items if it.sublist is not None]
        return 1 + max(inner, default=0)


Block = Union[Paragraph, Figure, Table, ListBlock]


@dataclass
class DocNode:
    heading: HeadingEntry
    blocks: list[Block] = field(default_factory=list)
    children: list["DocNode"] = field(default_factory=list)

    def walk(self) -> Iterator["DocNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


@dataclass
class DocTree:
    """Synthetic root: content before the first heading plus the top-level nodes."""

    blocks: list[Block] = field(default_factory=list)
    children: list[DocNode] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list, compare=False)

    def walk(self) -> Iterator[DocNode]:
        for child in self.children:
            yield from child.walk()

    def walk_with_parent(self) -> Iterator[tuple[DocNode | None, DocNode]]:
        stack: list[tuple[DocNode | None, DocNode]] = [(None, c) for c in reversed(self.children)]
        while stack:
            parent, node = stack.pop()
            yield parent, node
            stack.extend((node, c) for c in reversed(node.children))

    def headings(self) -> list[HeadingEntry]:
        return [n.heading for n in self.walk()]

    def structural_nodes(self) -> list[DocNode]:
        return [n for n in self.walk() if n.heading.kind.is_structural]
