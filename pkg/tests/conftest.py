"""Collects the outcome of every test marked ``criterion`` and prints one line per criterion at the end."""

import pytest

_RESULTS = {}
_DETAILS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.fixture
def detail(request):
    """Attach a short measured-value summary to the current criterion line."""
    marker = request.node.get_closest_marker("criterion")

    def note(text):
        _DETAILS[marker.args[0]] = text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    if report.failed or report.when == "call":
        previous = _RESULTS.get(number, (title, True))[1]
        _RESULTS[number] = (title, previous and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok = _RESULTS[number]
        line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}"
        if number in _DETAILS:
            line += f": {_DETAILS[number]}"
        terminalreporter.write_line(line)
