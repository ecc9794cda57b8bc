"""Class and package catalogs pulled out of "Class Descriptions" sections."""

from __future__ import annotations

import re
from dataclasses import dataclass
from html import escape
from typing import Iterable, Sequence

from .model import DocTree, HeadingKind
from .sitegen import PageSpec, page_filename, relative_href

DEFAULT_TRIGGER = "Class Descriptions"
UNASSIGNED = "(unassigned)"
CONCEPT_DIR = "concepts"
CLASS_PAGE = f"{CONCEPT_DIR}/classes.html"


@dataclass(frozen=True)
class ClassEntry:
    name: str
    packages: tuple[str, ...]
    page: str
    group_title: str


PackageCatalog = dict[str, list[ClassEntry]]


def extract_class_hierarchy(tree: DocTree, trigger: str = DEFAULT_TRIGGER) -> list[ClassEntry]:
    """Classes are the subsections of every section titled ``trigger...``.

    The group title is the title of the section's enclosing heading (usually
    the chapter), or empty for a top-level section.
    """
    entries: list[ClassEntry] = []
    for parent, node in tree.walk_with_parent():
        h = node.heading
        if h.kind is not HeadingKind.SECTION or not h.title.startswith(trigger):
            continue
        group = parent.heading.title if parent is not None else ""
        for child in node.children:
            ch = child.heading
            if ch.kind is HeadingKind.SUBSECTION:
                entries.append(ClassEntry(ch.title, ch.references, page_filename(ch.number), group))
    return entries


def default_packages(entries: Iterable[ClassEntry]) -> list[str]:
    """Every package named in a ``from`` clause, in first-seen order."""
    seen: dict[str, None] = {}
    for e in entries:
        for p in e.packages:
            seen.setdefault(p, None)
    return list(seen)


def matching_packages(reference: str, packages: Sequence[str]) -> list[str]:
    """Packages contained in ``reference``, minus any that a longer matching package contains."""
    hits = [p for p in packages if p in reference]
    return [p for p in hits if not any(q != p and p in q for q in hits)]


def extract_package_catalog(entries: Sequence[ClassEntry], packages: Sequence[str]) -> PackageCatalog:
    """Assign classes to packages; classes left without a package go under ``(unassigned)``."""
    catalog: PackageCatalog = {p: [] for p in packages}
    for entry in entries:
        assigned: list[str] = []
        for ref in entry.packages:
            for p in matching_packages(ref, packages):
                if p not in assigned:
                    assigned.append(p)
        if not assigned:
            catalog.setdefault(UNASSIGNED, []).append(entry)
        for p in assigned:
            catalog[p].append(entry)
    return catalog


def package_page_name(package: str) -> str:
    stem = re.sub(r"[^A-Za-z0-9._-]+", "_", package).strip("_") or "package"
    return f"{CONCEPT_DIR}/package-{stem}.html"


def _class_link(page: str, entry: ClassEntry) -> str:
    href = escape(relative_href(page, entry.page))
    return f'<a class="concept-class" href="{href}">{escape(entry.name, quote=False)}</a>'


def render_concept_pages(classes: Sequence[ClassEntry], catalog: PackageCatalog) -> list[PageSpec]:
    if not classes:
        return []
    pages = []
    class_page = PageSpec(CLASS_PAGE, "Class Hierarchy", kind="concept")
    groups: dict[str, list[ClassEntry]] = {}
    for entry in classes:
        groups.setdefault(entry.group_title, []).append(entry)
    for group, members in groups.items():
        class_page.body.append(f'<h2 class="concept-group">{escape(group or "Classes", quote=False)}</h2>')
        items = []
        for e in members:
            origin = f' <span class="concept-from">(from {escape(", ".join(e.packages), quote=False)})</span>' if e.packages else ""
            items.append(f"<li>{_class_link(CLASS_PAGE, e)}{origin}</li>")
        class_page.body.append('<ul class="concept-list">\n' + "\n".join(items) + "\n</ul>")
    pages.append(class_page)

    used: set[str] = {CLASS_PAGE}
    for package, members in catalog.items():
        if not members:
            continue
        name = package_page_name(package)
        n = 1
        while name in used:
            n += 1
            name = package_page_name(f"{package}-{n}")
        used.add(name)
        page = PageSpec(name, f"Package {package}", kind="concept")
        page.body.append(f'<h2 class="concept-group"><span>{escape(package, quote=False)}</span></h2>')
        links = "\n".join(f"<li>{_class_link(name, e)}</li>" for e in members)
        page.body.append(f'<ul class="concept-list">\n{links}\n</ul>')
        pages.append(page)
    return pages
