"""The end-to-end stages: flat XML -> structured XML -> site and statistics."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from . import concepts, crossref, sitegen, stats
from .config import PipelineConfig
from .errors import IoFailure
from .ingest import collect_heading_queue, parse_flat_stream, sanitize_stream
from .model import DocTree
from .structure import build_tree, classify_heading, validate_tree
from .structxml import parse_structured_xml, serialize_structured_xml

logger = logging.getLogger(__name__)

STRUCTURED_FILENAME = "structured.xml"
REPORT_FILENAME = "report.tsv"


def read_bytes(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc


def write_bytes(path: Path, data: bytes) -> None:
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc


def extract_tree(raw: bytes, config: PipelineConfig = PipelineConfig()) -> DocTree:
    """Flat stream bytes to a DocTree; diagnostics are logged with source lines."""
    events = parse_flat_stream(sanitize_stream(raw))
    queue = [classify_heading(line, config.patterns) for line in collect_heading_queue(events, config.marker)]
    tree = build_tree(queue, events)
    for diag in tree.diagnostics:
        logger.warning("%s", diag)
    return tree


def extract(raw: bytes, config: PipelineConfig = PipelineConfig()) -> bytes:
    """Flat stream bytes to structured XML bytes; raises InvalidTree on validation errors."""
    tree = extract_tree(raw, config)
    report = validate_tree(tree)
    for v in report.violations:
        logger.error("%s", v)
    return serialize_structured_xml(tree)


@dataclass
class Site:
    manifest: sitegen.SiteManifest
    bindings: list[crossref.KeywordBinding]
    classes: list[concepts.ClassEntry]
    catalog: concepts.PackageCatalog


def concept_catalog(tree: DocTree, config: PipelineConfig):
    classes = concepts.extract_class_hierarchy(tree, config.trigger)
    packages = list(config.packages) or concepts.default_packages(classes)
    return classes, concepts.extract_package_catalog(classes, packages)


def keyword_bindings(tree: DocTree, manifest: sitegen.SiteManifest) -> list[crossref.KeywordBinding]:
    return crossref.filter_ambiguous(crossref.build_keyword_map(manifest, tree))


def build_site(tree: DocTree, config: PipelineConfig = PipelineConfig(), asset_dir: Path | None = None) -> Site:
    classes, catalog = concept_catalog(tree, config) if config.concepts else ([], {})
    concept_pages = concepts.render_concept_pages(classes, catalog)
    manifest = sitegen.link_pages(sitegen.paginate(tree, concept_pages, asset_dir))
    bindings: list[crossref.KeywordBinding] = []
    if config.crossref:
        bindings = keyword_bindings(tree, manifest)
        rewritten = crossref.apply_crossrefs(manifest.all_pages(), bindings)
        n = len(manifest.pages)
        manifest.toc_page, manifest.pages, manifest.concept_pages = rewritten[0], rewritten[1 : n + 1], rewritten[n + 1 :]
    return Site(manifest, bindings, classes, catalog)


def render(tree: DocTree, out_dir: Path, config: PipelineConfig = PipelineConfig(), asset_dir: Path | None = None):
    site = build_site(tree, config, asset_dir)
    summary = sitegen.emit_site(site.manifest, out_dir)
    if config.crossref:
        write_bytes(Path(out_dir) / crossref.KEYWORDS_FILENAME, crossref.dump_keywords(site.bindings).encode("utf-8"))
    return site, summary


def report_row(tree: DocTree, name: str, config: PipelineConfig = PipelineConfig()) -> stats.ReportRow:
    mode = stats.MinOccurrence(config.min_occurrence) if config.min_occurrence is not None else stats.AllHeadings()
    prominence = stats.tree_prominence(tree, mode, config.tokenizer)
    site = build_site(tree, config)
    structural = len(site.manifest.pages)
    return stats.ReportRow(name, structural, len(site.bindings), prominence, site.manifest.page_count)


def load_structured(path: Path) -> DocTree:
    return parse_structured_xml(read_bytes(path))
