import numpy as np
import pytest

from dihedral.io import builtin_scenarios, load_builtin

CRITERIA = {
    "1": "spectrum regression",
    "2": "phase-matching law",
    "3": "figure-scenario classification",
    "4": "analytic/numeric oracle agreement",
    "5": "closed-form cross-checks",
    "6": "transform properties",
    "7": "design inverse",
    "8": "forbidden-pattern property",
    "G": "genericity of multi-trace motion",
}

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for cid in getattr(report, "criteria", ()):
        _outcomes.setdefault(cid, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criteria = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for cid, name in CRITERIA.items():
        res = _outcomes.get(cid)
        if res is None:
            continue
        status = "PASS" if all(res) else "FAIL"
        terminalreporter.write_line(
            f"criterion {cid} ({name}): {status}  [{sum(res)}/{len(res)} checks passed]")


@pytest.fixture(scope="session")
def scenarios():
    return {name: load_builtin(name) for name in builtin_scenarios()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
