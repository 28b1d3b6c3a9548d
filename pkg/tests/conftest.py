"""Shared fixtures and the per-criterion PASS/FAIL summary for the acceptance suite."""

from __future__ import annotations

import math
import re

import pytest
from hypothesis import HealthCheck, settings

from swisscheese.construction import assemble_theorem_one, build_regular_cheese

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _outcomes[k] = (verdict, m.group(2).replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        verdict, name = _outcomes[k]
        terminalreporter.write_line(f"criterion {k:2d} {verdict}  {name}")


@pytest.fixture(scope="session")
def small_cheese():
    """X1 with C0 = 1 and the first 8 enumerated targets."""
    return build_regular_cheese(1.0, 8)


@pytest.fixture(scope="session")
def assembled():
    """X = X1 n X2 with C = 4 pi, 8 targets and 4 stub Wermer levels."""
    return assemble_theorem_one(4 * math.pi, 8, 4)
