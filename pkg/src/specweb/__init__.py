"""Re-engineering flat PDF-export XML into structured XML and a hypertext site."""

from .errors import (
    EmptyHeadings,
    EmptyNumber,
    InvalidTree,
    IoFailure,
    MalformedInput,
    ReengineeringError,
    SchemaViolation,
    UnrecoverableMarkup,
)
from .ingest import collect_heading_queue, parse_flat_stream, sanitize_stream
from .model import DocNode, DocTree, HeadingEntry, HeadingKind
from .structure import build_tree, classify_heading, validate_tree
from .structxml import parse_structured_xml, serialize_structured_xml

__version__ = "0.1.0"

__all__ = [
    "DocNode",
    "DocTree",
    "EmptyHeadings",
    "EmptyNumber",
    "HeadingEntry",
    "HeadingKind",
    "InvalidTree",
    "IoFailure",
    "MalformedInput",
    "ReengineeringError",
    "SchemaViolation",
    "UnrecoverableMarkup",
    "build_tree",
    "classify_heading",
    "collect_heading_queue",
    "parse_flat_stream",
    "parse_structured_xml",
    "sanitize_stream",
    "serialize_structured_xml",
    "validate_tree",
]
