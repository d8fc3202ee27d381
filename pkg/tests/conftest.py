import time

import pytest

from subphon import default_feature_table, default_scheme


_acceptance: dict[str, str] = {}
_budgets: dict[str, float] = {}
_started = time.perf_counter()


@pytest.fixture(scope="session")
def table():
    return default_feature_table()


@pytest.fixture(scope="session")
def scheme():
    return default_scheme()


def pytest_sessionstart(session):
    global _started
    _started = time.perf_counter()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for label in getattr(report, "acceptance_labels", ()):
        # parametrized criteria pass only if every case passes
        if _acceptance.get(label) != "FAIL":
            _acceptance[label] = "PASS" if report.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    markers = list(item.iter_markers("acceptance"))
    report.acceptance_labels = [m.args[0] for m in markers]
    for m in markers:
        if "suite_budget" in m.kwargs:
            _budgets[m.args[0]] = m.kwargs["suite_budget"]


@pytest.hookimpl(tryfirst=True)
def pytest_sessionfinish(session):
    # criteria that also bound the wall time of the whole run
    elapsed = time.perf_counter() - _started
    for label, budget in _budgets.items():
        if label not in _acceptance:
            continue
        if elapsed >= budget:
            _acceptance[label] = "FAIL"
            session.exitstatus = pytest.ExitCode.TESTS_FAILED
        _acceptance[label] += f"  (run took {elapsed:.1f} s, budget {budget:.0f} s)"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s.split()[0].lstrip("AC").rstrip(":"))):
        status, _, note = _acceptance[label].partition("  ")
        terminalreporter.write_line(f"{status}  {label}" + (f"  {note}" if note else ""))
