import pytest

from padyn.parse import parse_poly

from corpus import CORPUS


@pytest.fixture(params=CORPUS, ids=[f"{e}|p={p}" for e, p, *_ in CORPUS])
def corpus_entry(request):
    expr, p, m, c, mp = request.param
    return parse_poly(expr, p), m, c, mp


_criteria: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    n, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else "FAIL"
        _criteria[n] = f"{status} criterion {n}: {title} ({rep.duration:.2f}s)"


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_criteria):
            terminalreporter.write_line(_criteria[n])
