import re
import time

import pytest

SESSION_START = time.perf_counter()
_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results = {}


def pytest_collection_modifyitems(items):
    # the whole-suite timing check has to run after everything else
    items.sort(key=lambda item: item.get_closest_marker("run_last") is not None)


def pytest_configure(config):
    config.addinivalue_line("markers", "run_last: run after every other test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.match(item.name)
    if m and (rep.when == "call" or rep.failed or rep.skipped):
        n = int(m.group(1))
        ok = _results.get(n, (True, []))[0] and rep.passed
        names = _results.get(n, (True, []))[1]
        if not rep.passed:
            names.append(item.name)
        _results[n] = (ok, names)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        ok, failed = _results[n]
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  (" + ", ".join(sorted(set(failed))) + ")"
        terminalreporter.write_line(line)
