import pytest

from nestfn.model import InputPoint, Parameters


@pytest.fixture
def worked():
    """The (A, sigma, delta, p, q) = (1, .5, .5, .5, .5) point at (K, L) = (4, 1)."""
    return Parameters(1.0, 0.5, 0.5, 0.5, 0.5), InputPoint(4.0, 1.0)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed or report.skipped:
        previous = _criteria.get(number)
        verdict = "FAIL" if failed else ("SKIP" if report.skipped else "PASS")
        if previous is None or previous[1] == "PASS":
            detail = dict(item.user_properties).get("detail", "")
            _criteria[number] = (title, verdict, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict, detail = _criteria[number]
        line = f"criterion {number:>2}  {verdict}  {title}"
        terminalreporter.write_line(f"{line}: {detail}" if detail else line)
