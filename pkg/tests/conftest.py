import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    details = [v for k, v in report.user_properties if k == "measured"]
    prev = _criteria.get(number)
    if prev is None:
        _criteria[number] = (title, report.passed, details)
    else:
        _criteria[number] = (title, prev[1] and report.passed, prev[2] + details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, details = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
        for line in details:
            terminalreporter.write_line(f"    {line}")
