import pytest

_results: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    prev = _results.get(number, (title, True))
    # a criterion passes only if every phase of every test tagged with it passes
    _results[number] = (title, prev[1] and not report.failed and not report.skipped)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, ok = _results[number]
        terminalreporter.write_line(f"AC{number:<3d} {'PASS' if ok else 'FAIL'}  {title}")
