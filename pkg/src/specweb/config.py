"""Pipeline configuration: an INI-style key/value file plus command-line overrides.

Example::

    [ingest]
    marker = LinkTarget

    [structure]
    keywords = Notation, Semantics, Attributes

    [concepts]
    trigger = Class Descriptions
    packages = Actions, CompleteActions, StructuredActions

    [stats]
    min_occurrence = 2
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .concepts import DEFAULT_TRIGGER
from .errors import IoFailure, ReengineeringError
from .ingest import DEFAULT_MARKER
from .structure import DEFAULT_PATTERNS, HeadingPatternConfig
from .stats import TokenizerConfig

_PATTERN_KEYS = ("part", "end_part", "last_part", "chapter", "section", "subsection")


class ConfigError(ReengineeringError):
    exit_code = 2


@dataclass(frozen=True)
class PipelineConfig:
    input: Path | None = None
    output: Path | None = None
    images: Path | None = None
    marker: str = DEFAULT_MARKER
    patterns: HeadingPatternConfig = DEFAULT_PATTERNS
    trigger: str = DEFAULT_TRIGGER
    # Empty means every package named in a "(from ...)" clause.
    packages: tuple[str, ...] = ()
    min_occurrence: int | None = None
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    concepts: bool = True
    crossref: bool = True

    def override(self, **changes) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _split(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def load_config(path: Path | str) -> PipelineConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    cfg = PipelineConfig()
    try:
        if parser.has_section("paths"):
            sec = parser["paths"]
            cfg = cfg.override(
                input=Path(sec["input"]) if "input" in sec else None,
                output=Path(sec["output"]) if "output" in sec else None,
                images=Path(sec["images"]) if "images" in sec else None,
            )
        if parser.has_section("ingest"):
            cfg = cfg.override(marker=parser["ingest"].get("marker"))
        if parser.has_section("structure"):
            sec = parser["structure"]
            patterns = {k: sec[k] for k in _PATTERN_KEYS if k in sec}
            if "keywords" in sec:
                patterns["keywords"] = _split(sec["keywords"])
            cfg = replace(cfg, patterns=HeadingPatternConfig(**patterns))
        if parser.has_section("concepts"):
            sec = parser["concepts"]
            cfg = cfg.override(
                trigger=sec.get("trigger"),
                packages=_split(sec["packages"]) if "packages" in sec else None,
                concepts=sec.getboolean("enabled"),
            )
        if parser.has_section("crossref"):
            cfg = cfg.override(crossref=parser["crossref"].getboolean("enabled"))
        if parser.has_section("stats"):
            sec = parser["stats"]
            cfg = cfg.override(
                min_occurrence=sec.getint("min_occurrence"),
                tokenizer=TokenizerConfig(frozenset(w.lower() for w in _split(sec["stopwords"])))
                if "stopwords" in sec
                else None,
            )
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not cfg.marker:
        raise ConfigError(f"{path}: marker must not be empty")
    return cfg
