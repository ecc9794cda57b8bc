"""Minimal expat-backed element tree that remembers source line numbers."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat


@dataclass
class Node:
    tag: str
    attrs: dict[str, str]
    line: int
    children: list = field(default_factory=list)

    def elements(self) -> list["Node"]:
        return [c for c in self.children if isinstance(c, Node)]

    def text_content(self) -> str:
        return "".join(c if isinstance(c, str) else c.text_content() for c in self.children)

    def own_text(self) -> str:
        return "".join(c for c in self.children if isinstance(c, str))

    def has_descendant(self, tags) -> bool:
        return any(isinstance(c, Node) and (c.tag in tags or c.has_descendant(tags)) for c in self.children)


def parse_xml(text: str) -> Node:
    """Parse ``text`` into a :class:`Node` tree; raises ``expat.ExpatError``."""
    root = Node("", {}, 0)
    stack = [root]
    parser = expat.ParserCreate()

    def start(tag, attrs):
        node = Node(tag, dict(attrs), parser.CurrentLineNumber)
        stack[-1].children.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    def chars(data):
        kids = stack[-1].children
        if kids and isinstance(kids[-1], str):
            kids[-1] += data
        else:
            kids.append(data)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.Parse(text, True)
    return root.elements()[0]
