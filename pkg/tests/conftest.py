import re

import pytest

RESULTS_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[RESULTS_KEY] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for the acceptance criterion under test."""
    results = request.config.stash[RESULTS_KEY]
    number = int(re.search(r"criterion_(\d+)", request.node.name).group(1))

    def record(passed: bool, detail: str) -> bool:
        results[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
        return passed

    yield record
    results.setdefault(number, (False, "raised before reporting"))


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[RESULTS_KEY]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        passed, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
