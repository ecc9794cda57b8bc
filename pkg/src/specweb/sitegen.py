"""Chunking a DocTree into small hypertext pages.

One page per structural heading (part, chapter, section, subsection and the
annex/index pages), a table of contents at ``index.html``, keyword headings
kept inside their host page as anchored sections, and a Previous/Next chain
in document order.
"""

from __future__ import annotations

import hashlib
import logging
import posixpath
import re
from dataclasses import dataclass, field, replace
from html import escape
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyNumber, InvalidTree, IoFailure
from .model import Block, DocNode, DocTree, Figure, HeadingKind, ListBlock, Paragraph, Table, page_key
from .structure import validate_tree

logger = logging.getLogger(__name__)

TOC_FILENAME = "index.html"
STYLESHEET = "style.css"
LIST_PALETTE = ("navy", "maroon", "olive")

STYLE_CSS = """\
body { font-family: Georgia, serif; margin: 2em auto; max-width: 60em; color: #222; }
.nav { margin: 1em 0; font-family: sans-serif; font-size: 90%; }
.nav a, .nav span { margin-right: 1.5em; }
.nav-disabled { color: #aaa; }
.heading-rank-1 { color: #5a1e6e; }
.heading-rank-2 { color: #1e3a6e; }
.heading-rank-3 { color: #1e5e6e; }
.heading-rank-4 { color: #2e6e1e; }
.heading-rank-6, .heading-rank-7 { color: #6e4a1e; }
.keyword-block { margin-left: 1em; }
.keyword-heading { color: #8b2500; }
.para { text-align: justify; }
.figure { text-align: center; margin: 1em 0; }
.figure-caption { font-style: italic; color: #444; }
.doc-table { border-collapse: collapse; margin: 1em auto; }
.doc-table caption { font-weight: bold; color: #1e3a6e; }
.doc-table th { background: #dde4f0; color: #1e3a6e; border: 1px solid #888; padding: 0.2em 0.5em; }
.doc-table td { border: 1px solid #888; padding: 0.2em 0.5em; }
.doc-list { text-align: justify; }
.list-depth-0 { color: navy; }
.list-depth-1 { color: maroon; }
.list-depth-2 { color: olive; }
.toc-list { list-style: none; padding-left: 1.5em; }
a.toc-link:link { color: #1e3a6e; }
a.toc-link:visited { color: #6e1e5a; }
.concept-group { color: #1e5e6e; }
.concept-from { color: #777; font-size: 90%; }
"""


@dataclass(frozen=True)
class Anchor:
    id: str
    label: str


@dataclass(frozen=True)
class Nav:
    prev: str | None = None
    next: str | None = None
    toc: str = TOC_FILENAME


@dataclass
class PageSpec:
    filename: str
    title: str
    number: str = ""
    body: list[str] = field(default_factory=list)
    anchors: list[Anchor] = field(default_factory=list)
    nav: Nav = field(default_factory=Nav)
    rank: int = 0
    kind: str = "page"

    @property
    def heading_text(self) -> str:
        return f"{self.number} {self.title}" if self.number else self.title


@dataclass
class SiteManifest:
    toc_page: PageSpec
    pages: list[PageSpec] = field(default_factory=list)
    concept_pages: list[PageSpec] = field(default_factory=list)
    asset_dir: Path | None = None
    # One link target per heading, aligned with the tree's pre-order walk.
    targets: list[str] = field(default_factory=list)

    def all_pages(self) -> list[PageSpec]:
        return [self.toc_page, *self.pages, *self.concept_pages]

    @property
    def page_count(self) -> int:
        return len(self.pages) + 1 + len(self.concept_pages)


def page_filename(number: str) -> str:
    if not number:
        raise EmptyNumber()
    return f"{number}.html"


def relative_href(from_page: str, target: str) -> str:
    """Express ``target`` (site-root relative) relative to ``from_page``'s folder."""
    base = posixpath.dirname(from_page)
    if not base:
        return target
    path, sep, frag = target.partition("#")
    return posixpath.relpath(path, base) + sep + frag


def slugify(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


# ---------------------------------------------------------------------------
# block rendering


def render_paragraph(p: Paragraph) -> str:
    return f'<p class="para">{escape(p.text, quote=False)}</p>'


def render_figure(f: Figure) -> str:
    parts = [
        '<div class="figure">',
        f'<img class="figure-image" src="{escape(f.src)}" alt="{escape(f.caption)}"/>',
    ]
    if f.caption:
        parts.append(f'<p class="figure-caption">{escape(f.caption, quote=False)}</p>')
    parts.append("</div>")
    return "\n".join(parts)


def render_table(t: Table) -> str:
    width = t.width
    out = ['<table class="doc-table">']
    if t.caption:
        out.append(f"<caption>{escape(t.caption, quote=False)}</caption>")

    def row(cells: Sequence[str], tag: str) -> str:
        padded = list(cells) + [""] * (width - len(cells))
        return "<tr>" + "".join(f"<{tag}>{escape(c, quote=False)}</{tag}>" for c in padded) + "</tr>"

    if t.header_rows:
        out.append("<thead>")
        out.extend(row(r, "th") for r in t.header_rows)
        out.append("</thead>")
    if t.data_rows:
        out.append("<tbody>")
        out.extend(row(r, "td") for r in t.data_rows)
        out.append("</tbody>")
    out.append("</table>")
    return "\n".join(out)


def render_list(lst: ListBlock, depth: int = 0) -> str:
    if not lst.items:
        return ""
    color = depth % len(LIST_PALETTE)
    out = [f'<ul class="doc-list list-depth-{color}">']
    for item in lst.items:
        parts = []
        if item.label:
            parts.append(f'<span class="li-label">{escape(item.label, quote=False)}</span>')
        if item.title:
            parts.append(f'<span class="li-title">{escape(item.title, quote=False)}</span>')
        inner = " ".join(parts)
        if item.sublist is not None:
            inner += render_list(item.sublist, depth + 1)
        out.append(f"<li>{inner}</li>")
    out.append("</ul>")
    return "\n".join(out)


def render_block(block: Block) -> str:
    if isinstance(block, Paragraph):
        return render_paragraph(block)
    if isinstance(block, Figure):
        return render_figure(block)
    if isinstance(block, Table):
        return render_table(block)
    if isinstance(block, ListBlock):
        return render_list(block)
    raise TypeError(f"not a block: {block!r}")


# ---------------------------------------------------------------------------
# pagination


class _AnchorIds:
    def __init__(self, key: str):
        self.key = key
        self.used: set[str] = set()

    def make(self, title: str) -> str:
        base = f"{slugify(title) or 'keyword'}-{self.key}"
        anchor, n = base, 1
        while anchor in self.used:
            n += 1
            anchor = f"{base}-{n}"
        self.used.add(anchor)
        return anchor


def _keyword_section(node: DocNode, page: PageSpec, ids: _AnchorIds, targets: dict[int, str], level: int) -> str:
    anchor = ids.make(node.heading.title)
    page.anchors.append(Anchor(anchor, node.heading.title))
    targets[id(node)] = f"{page.filename}#{anchor}"
    h = min(level, 6)
    parts = [
        f'<div class="keyword-block" id="{anchor}">',
        f'<h{h} class="keyword-heading">{escape(node.heading.title, quote=False)}</h{h}>',
    ]
    parts.extend(render_block(b) for b in node.blocks)
    parts.extend(_keyword_children(node, page, ids, targets, level + 1))
    parts.append("</div>")
    return "\n".join(p for p in parts if p)


def _keyword_children(node, page: PageSpec, ids: _AnchorIds, targets: dict[int, str], level: int) -> list[str]:
    return [
        _keyword_section(c, page, ids, targets, level)
        for c in node.children
        if c.heading.kind is HeadingKind.KEYWORD
    ]


def _toc_items(nodes: Iterable[DocNode], depth: int) -> str:
    items = []
    for node in nodes:
        h = node.heading
        if not h.kind.is_structural:
            inner = _toc_items(node.children, depth)
            if inner:
                items.append(inner)
            continue
        href = page_filename(page_key(h))
        sub = _toc_items(node.children, depth + 1)
        sub_html = f'\n<ul class="toc-list toc-depth-{depth + 1}">\n{sub}\n</ul>' if sub else ""
        items.append(
            f'<li class="toc-entry heading-rank-{int(h.kind)}">'
            f'<a class="toc-link" href="{escape(href)}">{escape(h.label, quote=False)}</a>{sub_html}</li>'
        )
    return "\n".join(items)


def render_toc(tree: DocTree, concept_pages: Sequence[PageSpec] = ()) -> PageSpec:
    page = PageSpec(TOC_FILENAME, "Table of Contents", kind="toc")
    body = ['<h1 class="toc-title">Table of Contents</h1>']
    items = _toc_items(tree.children, 0)
    if items:
        body.append(f'<ul class="toc-list toc-depth-0">\n{items}\n</ul>')
    if concept_pages:
        links = "\n".join(
            f'<li class="toc-entry"><a class="toc-link" href="{escape(p.filename)}">{escape(p.title, quote=False)}</a></li>'
            for p in concept_pages
        )
        body.append(f'<h2 class="toc-title">Concepts</h2>\n<ul class="toc-list toc-depth-0">\n{links}\n</ul>')
    page.body = body
    return page


def paginate(tree: DocTree, concept_pages: Sequence[PageSpec] = (), asset_dir: Path | None = None) -> SiteManifest:
    """One page per structural heading, in pre-order, plus the ToC page."""
    report = validate_tree(tree)
    if not report.ok:
        raise InvalidTree(report.violations)
    toc = render_toc(tree, concept_pages)
    targets: dict[int, str] = {}
    # Front matter and top-level keyword sections have no page of their own; they
    # follow the contents list on the ToC page.
    front_ids = _AnchorIds("front")
    toc.body.extend(render_block(b) for b in tree.blocks)
    for node in tree.children:
        if node.heading.kind is HeadingKind.KEYWORD:
            toc.body.append(_keyword_section(node, toc, front_ids, targets, 2))
    pages = []
    for node in tree.walk():
        h = node.heading
        if not h.kind.is_structural:
            continue
        key = page_key(h)
        page = PageSpec(page_filename(key), h.title, h.number, rank=int(h.kind))
        targets[id(node)] = page.filename
        ids = _AnchorIds(key)
        page.body.extend(render_block(b) for b in node.blocks)
        page.body.extend(_keyword_children(node, page, ids, targets, 2))
        page.body = [f for f in page.body if f]
        pages.append(page)
    toc.body = [f for f in toc.body if f]
    ordered = [targets.get(id(n), "") for n in tree.walk()]
    return SiteManifest(toc, pages, list(concept_pages), asset_dir, ordered)


def link_pages(manifest: SiteManifest) -> SiteManifest:
    """Previous/Next links between consecutive pages, swept pairwise in order."""
    pages = [replace(p, nav=Nav()) for p in manifest.pages]

    def setup_link(x1: int, x2: int) -> None:
        pages[x1].nav = replace(pages[x1].nav, next=pages[x2].filename)
        pages[x2].nav = replace(pages[x2].nav, prev=pages[x1].filename)

    if len(pages) >= 2:
        a1 = 0
        for a2 in range(1, len(pages)):
            setup_link(a1, a2)
            a1 = a2
    return replace(manifest, pages=pages)


# ---------------------------------------------------------------------------
# emission


def _nav_html(page: PageSpec) -> str:
    def link(cls: str, target: str | None, label: str) -> str:
        if target is None:
            return f'<span class="{cls} nav-disabled">{label}</span>'
        return f'<a class="{cls}" href="{escape(relative_href(page.filename, target))}">{label}</a>'

    return (
        '<div class="nav">'
        + link("nav-prev", page.nav.prev, "Previous")
        + link("nav-toc", page.nav.toc, "Contents")
        + link("nav-next", page.nav.next, "Next")
        + "</div>"
    )


def render_page_html(page: PageSpec) -> str:
    css = relative_href(page.filename, STYLESHEET)
    out = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8"/>',
        f"<title>{escape(page.heading_text, quote=False)}</title>",
        f'<link rel="stylesheet" href="{escape(css)}"/>',
        "</head>",
        f'<body class="page-{page.kind}">',
    ]
    if page.kind != "toc":
        out.append(_nav_html(page))
        out.append(f'<h1 class="heading heading-rank-{page.rank}">{escape(page.heading_text, quote=False)}</h1>')
    out.extend(page.body)
    if page.kind != "toc":
        out.append(_nav_html(page))
    out.extend(["</body>", "</html>", ""])
    return "\n".join(out)


@dataclass
class EmitSummary:
    pages: int
    files: int
    bytes: int
    missing_images: list[str] = field(default_factory=list)
    digest: str = ""

    def __str__(self) -> str:
        return f"{self.pages} pages, {self.files} files, {self.bytes} bytes"


def _referenced_images(manifest: SiteManifest) -> list[str]:
    found: set[str] = set()
    for page in manifest.all_pages():
        for fragment in page.body:
            found.update(re.findall(r'<img [^>]*src="([^"]+)"', fragment))
    return sorted(found)


def emit_site(manifest: SiteManifest, out_dir: Path | str) -> EmitSummary:
    """Write every page, the shared stylesheet and the image folder."""
    out = Path(out_dir)
    written: dict[str, bytes] = {}
    for page in manifest.all_pages():
        written[page.filename] = render_page_html(page).encode("utf-8")
    written[STYLESHEET] = STYLE_CSS.encode("utf-8")

    missing = []
    for src in _referenced_images(manifest):
        source = manifest.asset_dir.parent / src if manifest.asset_dir else None
        if source is None or not source.is_file():
            missing.append(src)
            logger.warning("image %s not found; the page will show a broken image", src)
    if manifest.asset_dir is not None and manifest.asset_dir.is_dir():
        for image in sorted(p for p in manifest.asset_dir.rglob("*") if p.is_file()):
            rel = posixpath.join("images", image.relative_to(manifest.asset_dir).as_posix())
            written[rel] = image.read_bytes()

    digest = hashlib.sha256()
    total = 0
    for name in sorted(written):
        data = written[name]
        target = out / name
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
        except OSError as exc:
            raise IoFailure(target, exc.strerror or str(exc)) from exc
        digest.update(name.encode() + b"\0" + hashlib.sha256(data).digest())
        total += len(data)
    html_count = len(manifest.all_pages())
    return EmitSummary(html_count, len(written), total, missing, digest.hexdigest())

