from __future__ import annotations

import pytest

from annotated_rows import RESOURCES
from subqa.resources import builtin_profile, load_lexicons

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.when == "call" or report.failed:
        entry["ran"] = True
        if report.failed:
            entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number}: {entry['title']}")


@pytest.fixture(scope="session")
def de_lexicons():
    return load_lexicons(RESOURCES, "en", "de")


@pytest.fixture(scope="session")
def es_lexicons():
    return load_lexicons(RESOURCES, "en", "es")


@pytest.fixture(scope="session")
def de_profile():
    return builtin_profile("de")
