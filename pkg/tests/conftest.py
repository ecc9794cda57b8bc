"""Shared fixtures plus a per-criterion pass/fail summary for the acceptance suite."""

from __future__ import annotations

from collections import defaultdict
from importlib import resources
from pathlib import Path

import pytest

CRITERIA = {
    1: "mis-nesting regression",
    2: "stack balance",
    3: "page-count law",
    4: "navigation chain",
    5: "round trip and deterministic emission",
    6: "cross-reference correctness",
    7: "concept extraction",
    8: "prominence formula",
    9: "end-to-end desk scale",
}

_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_runtest_logreport(report):
    criterion = dict(report.user_properties).get("criterion")
    if criterion is None:
        return
    if report.when == "call" or report.failed:
        _outcomes[criterion].append(report.passed)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n} ({label}): {status}")


@pytest.fixture(scope="session")
def sample_dir() -> Path:
    return Path(str(resources.files("specweb") / "data" / "sample"))


@pytest.fixture(scope="session")
def sample_spec(sample_dir) -> Path:
    return sample_dir / "sample_spec.xml"
