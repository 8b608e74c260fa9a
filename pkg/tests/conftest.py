import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion a test belongs to")
    config.addinivalue_line("markers", "slow: long-running exhaustive or batch checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    num, title = mark.args
    entry = _RESULTS.setdefault(num, {"title": title, "ok": True, "n": 0, "secs": 0.0})
    if rep.when == "call":
        entry["n"] += 1
        entry["secs"] += rep.duration
    if rep.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        e = _RESULTS[num]
        tr.write_line(f"criterion {num}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
                      f"  ({e['n']} tests, {e['secs']:.1f}s)")
