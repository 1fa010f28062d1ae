import os

import pytest

from cpd.models import load_builtin


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CPD_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="long-running tier; set CPD_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def fig2():
    return load_builtin("fig2")


_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1][len("test_criterion_"):]
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(name, {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: (int(n.split("_")[0]), n)):
        terminalreporter.write_line(f"criterion {name}: {_CRITERIA[name]}")
