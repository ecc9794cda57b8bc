"""Keyword cross-referencing across the generated pages.

Every heading title becomes a binding ``keyword -> page or anchor``.  Bindings
are stored one per line as ``keyword@<a href="target">keyword</a>`` in
``UniqueKeywords.txt``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from html import escape, unescape
from typing import Iterable, Sequence

from .model import DocTree
from .sitegen import PageSpec, SiteManifest, relative_href

KEYWORDS_FILENAME = "UniqueKeywords.txt"

_LINE_FORMAT = re.compile(r'^(?P<kw>[^@\n]+)@<a href="(?P<href>[^"]*)">(?P<text>.*)</a>$')


@dataclass(frozen=True)
class KeywordBinding:
    keyword: str
    target: str

    @property
    def replacement(self) -> str:
        return anchor_fragment(self.keyword, self.target)

    @property
    def line(self) -> str:
        return f"{self.keyword}@{self.replacement}"


def anchor_fragment(keyword: str, href: str) -> str:
    return f'<a href="{escape(href)}">{escape(keyword, quote=False)}</a>'


def build_keyword_map(manifest: SiteManifest, tree: DocTree) -> list[KeywordBinding]:
    """One binding per heading title, in document order."""
    bindings = []
    for node, target in zip(tree.walk(), manifest.targets):
        title = node.heading.title.strip()
        if not title or not target or "@" in title:
            continue
        bindings.append(KeywordBinding(title, target))
    return bindings


def filter_ambiguous(bindings: Iterable[KeywordBinding]) -> list[KeywordBinding]:
    """Drop keywords bound to several targets; order the rest longest first."""
    targets: dict[str, set[str]] = {}
    first: dict[str, KeywordBinding] = {}
    for b in bindings:
        targets.setdefault(b.keyword, set()).add(b.target)
        first.setdefault(b.keyword, b)
    kept = [b for kw, b in first.items() if len(targets[kw]) == 1]
    # sorted() is stable, so equal lengths keep document order.
    return sorted(kept, key=lambda b: -len(b.keyword))


def dump_keywords(bindings: Sequence[KeywordBinding]) -> str:
    return "".join(b.line + "\n" for b in bindings)


def load_keywords(text: str) -> list[KeywordBinding]:
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _LINE_FORMAT.match(line)
        if m is None:
            raise ValueError(f"{KEYWORDS_FILENAME} line {n}: expected keyword@<a href=...>keyword</a>")
        out.append(KeywordBinding(m.group("kw"), unescape(m.group("href"))))
    return out


# ---------------------------------------------------------------------------
# rewriting

_TAG = re.compile(r"<[^>]*>")


def _page_of(target: str) -> str:
    return target.partition("#")[0]


def _rewrite_text_segments(html: str, pattern: re.Pattern, link: str) -> str:
    """Apply ``pattern -> link`` to text outside tags and outside any ``<a>``."""
    out = []
    depth = 0
    pos = 0
    for m in _TAG.finditer(html):
        text = html[pos:m.start()]
        out.append(pattern.sub(lambda _: link, text) if depth == 0 and text else text)
        tag = m.group(0)
        if re.match(r"<a[\s>]", tag, re.I):
            depth += 1
        elif re.match(r"</a\s*>", tag, re.I):
            depth = max(0, depth - 1)
        out.append(tag)
        pos = m.end()
    tail = html[pos:]
    out.append(pattern.sub(lambda _: link, tail) if depth == 0 and tail else tail)
    return "".join(out)


def keyword_pattern(keyword: str) -> re.Pattern:
    # '&' and '#' in the look-behind keep matches out of character entities.
    return re.compile(r"(?<![\w&#])" + re.escape(escape(keyword, quote=False)) + r"(?!\w)")


def apply_crossrefs(pages: Sequence[PageSpec], bindings: Sequence[KeywordBinding]) -> list[PageSpec]:
    """Link every whole-word keyword occurrence outside existing anchors.

    Bindings are applied in the given order, one pass each, so an earlier
    (longer) keyword shields its text from later, shorter ones.  A page never
    links to itself.
    """
    compiled = [(b, keyword_pattern(b.keyword), escape(b.keyword, quote=False)) for b in bindings]
    result = []
    for page in pages:
        body = list(page.body)
        for b, pattern, needle in compiled:
            if _page_of(b.target) == page.filename:
                continue
            link = anchor_fragment(b.keyword, relative_href(page.filename, b.target))
            for i, fragment in enumerate(body):
                if needle in fragment:
                    body[i] = _rewrite_text_segments(fragment, pattern, link)
        result.append(replace(page, body=body))
    return result


def visible_text(html: str) -> str:
    return unescape(_TAG.sub("", html))
