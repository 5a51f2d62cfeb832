import pytest

_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the outcome is filled in after the test runs."""
    entry = {"name": request.node.name, "label": "", "detail": ""}
    _RESULTS.append(entry)

    def describe(label, detail=""):
        entry["label"] = label
        entry["detail"] = detail

    return describe


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        for entry in _RESULTS:
            if entry["name"] == item.name:
                entry["passed"] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for entry in _RESULTS:
        status = "PASS" if entry.get("passed") else "FAIL"
        line = f"[{status}] {entry['label'] or entry['name']}"
        if entry["detail"]:
            line += f" -- {entry['detail']}"
        terminalreporter.write_line(line)
