"""Well-formedness and internal link checks for an emitted site.

Pages are XHTML-compatible, so a strict XML parse doubles as the
well-formedness check.  Every relative ``href``/``src`` must name an
existing file, and a ``#fragment`` must name an ``id`` on the target page.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import unquote, urlsplit
from xml.parsers.expat import ExpatError

from .xmlutil import Node, parse_xml


@dataclass(frozen=True)
class LinkProblem:
    page: str
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.page}:{self.line}: {self.message}"


@dataclass
class LinkReport:
    pages: int = 0
    links: int = 0
    problems: list[LinkProblem] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def _strip_doctype(text: str) -> str:
    # expat would try to resolve the external DTD subset otherwise; keep line numbers.
    start = text.find("<!DOCTYPE")
    if start < 0:
        return text
    end = text.find(">", start)
    return text[:start] + "\n" * text.count("\n", start, end) + text[end + 1 :]


def _walk(node: Node):
    yield node
    for child in node.elements():
        yield from _walk(child)


def _is_external(url: str) -> bool:
    parts = urlsplit(url)
    return bool(parts.scheme or parts.netloc)


def check_site(root: Path | str) -> LinkReport:
    root = Path(root)
    report = LinkReport()
    ids: dict[Path, set[str]] = {}
    refs: list[tuple[str, int, Path, str]] = []

    for page in sorted(root.rglob("*.html")):
        rel = page.relative_to(root).as_posix()
        report.pages += 1
        try:
            tree = parse_xml(_strip_doctype(page.read_text(encoding="utf-8")))
        except (ExpatError, UnicodeDecodeError) as exc:
            line = getattr(exc, "lineno", 0) or 0
            report.problems.append(LinkProblem(rel, line, f"not well-formed: {exc}"))
            continue
        seen = ids.setdefault(page.resolve(), set())
        for el in _walk(tree):
            if "id" in el.attrs:
                if el.attrs["id"] in seen:
                    report.problems.append(LinkProblem(rel, el.line, f"duplicate id {el.attrs['id']!r}"))
                seen.add(el.attrs["id"])
            for attr in ("href", "src"):
                url = el.attrs.get(attr)
                if url is not None and not _is_external(url):
                    refs.append((rel, el.line, page, url))

    for rel, line, page, url in refs:
        report.links += 1
        parts = urlsplit(url)
        target = (page.parent / unquote(parts.path)).resolve() if parts.path else page.resolve()
        if not target.is_file():
            report.problems.append(LinkProblem(rel, line, f"broken link {url!r}"))
        elif parts.fragment and parts.fragment not in ids.get(target, set()):
            report.problems.append(LinkProblem(rel, line, f"missing anchor {url!r}"))
    return report
