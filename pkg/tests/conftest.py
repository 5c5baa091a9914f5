import pytest

_CRITERIA: dict[str, list[tuple[str, bool, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    detail = getattr(item, "criterion_detail", "")
    _CRITERIA.setdefault(marker.args[0], []).append((item.name, rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: (int(s.split(".")[0]), s)):
        for name, passed, detail in _CRITERIA[label]:
            status = "PASS" if passed else "FAIL"
            tr.write_line(f"[{status}] criterion {label}: {name}" + (f" ({detail})" if detail else ""))


@pytest.fixture
def detail(request):
    """Attach a short measurement string to the acceptance summary line."""
    def set_detail(text):
        request.node.criterion_detail = text
    return set_detail
