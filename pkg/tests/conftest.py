import pytest

from lsss.latin_core import LatinSquare, PartialLatinSquare

_ACCEPTANCE = []


@pytest.fixture
def order3_sets():
    """The cyclic order-3 square and three of its critical sets, 0-indexed."""
    P = PartialLatinSquare.from_triples
    return {
        "L": LatinSquare([[0, 1, 2], [1, 2, 0], [2, 0, 1]]),
        "C1": P(3, [(0, 0, 0), (1, 1, 2)]),
        "C2": P(3, [(1, 1, 2), (2, 2, 1)]),
        "C3": P(3, [(0, 0, 0), (2, 2, 1)]),
    }


@pytest.fixture
def completion_trio():
    P = PartialLatinSquare.from_triples
    return {
        "left": P(4, [(0, 0, 0), (0, 2, 3), (1, 1, 2), (2, 2, 1), (3, 3, 3)]),
        "middle": LatinSquare([[0, 1, 3, 2], [3, 2, 0, 1], [2, 3, 1, 0], [1, 0, 2, 3]]),
        "right": P(4, [(0, 0, 0), (0, 2, 3), (0, 3, 1), (3, 1, 2)]),
    }


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        _ACCEPTANCE.append((marker.args[0], marker.args[1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, outcome in sorted(_ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {num:>2}. {title}")
