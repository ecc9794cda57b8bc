"""Command-line entry point: ``specweb <subcommand> ...``.

Exit codes: 0 ok, 1 validation errors, 2 I/O problems, 3 malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import crossref, linkcheck, pipeline, stats
from .config import PipelineConfig, load_config
from .errors import IoFailure, ReengineeringError
from .structure import validate_tree
from .sitegen import paginate

logger = logging.getLogger("specweb")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_MALFORMED = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", type=Path, help="input file (flat XML or structured XML)")
    common.add_argument("--out", "-o", type=Path, help="output file or directory")
    common.add_argument("--config", "-c", type=Path, help="INI-style configuration file")
    common.add_argument("--marker", help="substring of the id attribute marking headings (default LinkTarget)")
    common.add_argument("--min-occurrence", type=int, metavar="K", help="only count heading tokens seen more than K times")
    common.add_argument("--images", type=Path, help="image folder to copy (default: images/ next to the input)")
    common.add_argument("--name", help="document name in the statistics report (default: input file stem)")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--quiet", "-q", action="store_true")

    parser = argparse.ArgumentParser(
        prog="specweb",
        description="Re-engineer flat PDF-export XML into structured XML and a cross-referenced hypertext site.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("extract", parents=[common], help="flat XML -> structured XML")
    sub.add_parser("render", parents=[common], help="structured XML -> hypertext site")
    sub.add_parser("concepts", parents=[common], help="list the class/package catalog of a structured XML file")
    sub.add_parser("crossref", parents=[common], help="write the keyword bindings (UniqueKeywords.txt)")
    sub.add_parser("stats", parents=[common], help="heading prominence report (TSV)")
    sub.add_parser("check", parents=[common], help="well-formedness and internal link check of a rendered site")
    p = sub.add_parser("pipeline", parents=[common], help="extract, render and stats in one run")
    p.add_argument("--dry-run", action="store_true", help="validate only; write nothing")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    cfg = cfg.override(input=args.input, output=args.out, marker=args.marker, images=args.images)
    if args.min_occurrence is not None:
        cfg = cfg.override(min_occurrence=args.min_occurrence)
    return cfg


def _require_input(cfg: PipelineConfig) -> Path:
    if cfg.input is None:
        raise IoFailure("<input>", "no input given (use --input or [paths] input)")
    return cfg.input


def _emit(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        pipeline.write_bytes(out, data)


def _asset_dir(cfg: PipelineConfig, source: Path) -> Path | None:
    images = cfg.images or source.parent / "images"
    return images if images.is_dir() else None


def cmd_extract(cfg: PipelineConfig) -> int:
    source = _require_input(cfg)
    _emit(pipeline.extract(pipeline.read_bytes(source), cfg), cfg.output)
    return EXIT_OK


def cmd_render(cfg: PipelineConfig) -> int:
    source = _require_input(cfg)
    if cfg.output is None:
        raise IoFailure("<out>", "render needs an output directory (--out)")
    tree = pipeline.load_structured(source)
    site, summary = pipeline.render(tree, cfg.output, cfg, _asset_dir(cfg, source))
    print(f"wrote {summary} to {cfg.output}")
    if summary.missing_images:
        print(f"warning: {len(summary.missing_images)} referenced image(s) not found", file=sys.stderr)
    return EXIT_OK


def cmd_concepts(cfg: PipelineConfig) -> int:
    tree = pipeline.load_structured(_require_input(cfg))
    classes, catalog = pipeline.concept_catalog(tree, cfg)
    lines = ["package\tclass\tpage\tgroup"]
    for package, members in catalog.items():
        lines.extend(f"{package}\t{e.name}\t{e.page}\t{e.group_title}" for e in members)
    _emit(("\n".join(lines) + "\n").encode("utf-8"), cfg.output)
    return EXIT_OK


def cmd_crossref(cfg: PipelineConfig) -> int:
    tree = pipeline.load_structured(_require_input(cfg))
    bindings = pipeline.keyword_bindings(tree, paginate(tree))
    _emit(crossref.dump_keywords(bindings).encode("utf-8"), cfg.output)
    return EXIT_OK


def cmd_stats(cfg: PipelineConfig, name: str | None = None) -> int:
    source = _require_input(cfg)
    tree = pipeline.load_structured(source)
    row = pipeline.report_row(tree, name or source.stem, cfg)
    _emit(stats.emit_report([row]), cfg.output)
    return EXIT_OK


def cmd_check(cfg: PipelineConfig) -> int:
    site = _require_input(cfg)
    if not site.is_dir():
        raise IoFailure(site, "not a directory")
    report = linkcheck.check_site(site)
    for problem in report.problems:
        print(problem, file=sys.stderr)
    print(f"{report.pages} pages, {report.links} links, {len(report.problems)} problem(s)")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_pipeline(cfg: PipelineConfig, dry_run: bool = False, name: str | None = None) -> int:
    source = _require_input(cfg)
    raw = pipeline.read_bytes(source)
    if dry_run:
        tree = pipeline.extract_tree(raw, cfg)
        report = validate_tree(tree)
        for v in report.violations:
            logger.error("%s", v)
        if report.ok:
            paginate(tree)
        print(f"{len(tree.headings())} headings, {len(report)} validation error(s); nothing written")
        return EXIT_OK if report.ok else EXIT_INVALID
    if cfg.output is None:
        raise IoFailure("<out>", "pipeline needs an output directory (--out)")
    out = cfg.output
    structured = pipeline.extract(raw, cfg)
    pipeline.write_bytes(out / pipeline.STRUCTURED_FILENAME, structured)
    # Continue from the serialized form so the run matches extract; render; stats.
    tree = pipeline.load_structured(out / pipeline.STRUCTURED_FILENAME)
    site, summary = pipeline.render(tree, out, cfg, _asset_dir(cfg, source))
    row = pipeline.report_row(tree, name or source.stem, cfg)
    report = stats.emit_report([row])
    pipeline.write_bytes(out / pipeline.REPORT_FILENAME, report)
    print(f"wrote {summary} to {out}")
    sys.stdout.write(report.decode("utf-8"))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "pipeline":
            return cmd_pipeline(cfg, args.dry_run, args.name)
        if args.command == "stats":
            return cmd_stats(cfg, args.name)
        handler = {
            "extract": cmd_extract,
            "render": cmd_render,
            "concepts": cmd_concepts,
            "crossref": cmd_crossref,
            "check": cmd_check,
        }[args.command]
        return handler(cfg)
    except ReengineeringError as exc:
        where = f"{cfg.input}: " if "cfg" in locals() and cfg.input else ""
        print(f"error: {where}{exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
