import pytest

_criteria: dict[int, list] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        number, text = marker
        _criteria.setdefault(number, [text, True])
        if report.outcome != "passed":
            _criteria[number][1] = False


@pytest.fixture(autouse=True)
def _record_criterion(request):
    marker = request.node.get_closest_marker("criterion")
    if marker:
        request.node.user_properties.append(("criterion", tuple(marker.args)))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        text, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")
