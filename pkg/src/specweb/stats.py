"""Token frequency ranking and heading prominence.

Heading tokens are located in the frequency-ranked list of document tokens;
the mean of their 1-based ranks, relative to the length of that list, says
how close to the top of the vocabulary the headings sit.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyHeadings, EmptyReport
from .model import Block, DocTree, Figure, ListBlock, Paragraph, Table

_TOKEN = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: frozenset[str] = frozenset()


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Lowercased maximal alphanumeric runs."""
    tokens = _TOKEN.findall(text.lower())
    if config is not None and config.stopwords:
        tokens = [t for t in tokens if t not in config.stopwords]
    return tokens


@dataclass(frozen=True)
class TokenRanking:
    entries: tuple[tuple[str, int], ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def ranks(self) -> dict[str, int]:
        return {tok: i for i, (tok, _) in enumerate(self.entries, 1)}

    def counts(self) -> dict[str, int]:
        return dict(self.entries)


def rank_tokens(tokens: Iterable[str]) -> TokenRanking:
    """Counts sorted descending; ties keep first-occurrence order."""
    counts = Counter(tokens)  # insertion order == first occurrence
    ordered = sorted(counts.items(), key=lambda kv: -kv[1])
    return TokenRanking(tuple(ordered))


@dataclass(frozen=True)
class AllHeadings:
    def keep(self, count: int) -> bool:
        return True

    def __str__(self) -> str:
        return "all"


@dataclass(frozen=True)
class MinOccurrence:
    """Keep only heading tokens occurring more than ``k`` times in the document."""

    k: int

    def keep(self, count: int) -> bool:
        return count > self.k

    def __str__(self) -> str:
        return f">{self.k}"


@dataclass(frozen=True)
class ProminenceReport:
    distinct_doc_tokens: int
    raw_doc_tokens: int
    heading_token_count: int
    positions: tuple[int, ...]
    mean: Fraction
    percentage: Fraction
    mode: AllHeadings | MinOccurrence = field(default_factory=AllHeadings)
    missing: tuple[str, ...] = ()


def heading_prominence(
    doc_ranking: TokenRanking,
    heading_tokens: Iterable[str],
    mode: AllHeadings | MinOccurrence | None = None,
) -> ProminenceReport:
    """Positions of the heading tokens in ``doc_ranking``, their mean and percentage.

    percentage = mean * 100 / (number of ranked document tokens).
    Heading tokens absent from the document are reported in ``missing``.
    """
    mode = mode or AllHeadings()
    heading_set = list(dict.fromkeys(heading_tokens))
    ranks = doc_ranking.ranks()
    counts = doc_ranking.counts()
    missing = tuple(t for t in heading_set if t not in ranks)
    positions = sorted(ranks[t] for t in heading_set if t in ranks and mode.keep(counts[t]))
    if not positions:
        raise EmptyHeadings()
    distinct = len(doc_ranking)
    mean = Fraction(sum(positions), len(positions))
    return ProminenceReport(
        distinct_doc_tokens=distinct,
        raw_doc_tokens=doc_ranking.total,
        heading_token_count=len(heading_set),
        positions=tuple(positions),
        mean=mean,
        percentage=mean * 100 / distinct,
        mode=mode,
        missing=missing,
    )


# ---------------------------------------------------------------------------
# corpus extraction


def _block_texts(block: Block) -> Iterable[str]:
    if isinstance(block, Paragraph):
        yield block.text
    elif isinstance(block, Figure):
        yield block.caption
    elif isinstance(block, Table):
        yield block.caption
        for row in block.header_rows + block.data_rows:
            yield from row
    elif isinstance(block, ListBlock):
        for item in block.items:
            yield item.label
            yield item.title
            if item.sublist is not None:
                yield from _block_texts(item.sublist)


def document_texts(tree: DocTree) -> tuple[list[str], list[str]]:
    """(all document text, heading titles); the document text includes the headings."""
    body: list[str] = []
    headings: list[str] = []
    for b in tree.blocks:
        body.extend(_block_texts(b))
    for node in tree.walk():
        headings.append(node.heading.title)
        body.append(node.heading.title)
        for b in node.blocks:
            body.extend(_block_texts(b))
    return body, headings


def tree_prominence(tree: DocTree, mode=None, config: TokenizerConfig | None = None) -> ProminenceReport:
    body, headings = document_texts(tree)
    doc_tokens = [t for text in body for t in tokenize(text, config)]
    heading_tokens = [t for text in headings for t in tokenize(text, config)]
    return heading_prominence(rank_tokens(doc_tokens), heading_tokens, mode)


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ReportRow:
    name: str
    headings: int
    crossref_headings: int
    prominence: ProminenceReport
    pages: int


COLUMNS = (
    "document",
    "headings",
    "headings_in_crossref",
    "doc_tokens",
    "doc_tokens_raw",
    "heading_tokens",
    "positions",
    "mean_position",
    "percentage",
    "mode",
    "hypertext_pages",
)


def format_percentage(value: Fraction) -> str:
    return f"{float(value):.1f}%"


def emit_report(rows: Sequence[ReportRow]) -> bytes:
    """Tab-separated table, one row per document, columns mirroring the evaluation table."""
    if not rows:
        raise EmptyReport()
    lines = ["\t".join(COLUMNS)]
    for r in rows:
        p = r.prominence
        lines.append(
            "\t".join(
                str(v)
                for v in (
                    r.name,
                    r.headings,
                    r.crossref_headings,
                    p.distinct_doc_tokens,
                    p.raw_doc_tokens,
                    p.heading_token_count,
                    len(p.positions),
                    f"{float(p.mean):.2f}",
                    format_percentage(p.percentage),
                    p.mode,
                    r.pages,
                )
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")
