from pathlib import Path

import pytest

BODIES = Path(__file__).resolve().parent.parent / "bodies"

CRITERIA = {
    1: "cone profile exactness and scaling law",
    2: "solid angles: exact path and Monte-Carlo agreement",
    3: "uniform-geometry constants of the half-space",
    4: "apex minimizes intrinsic-ball volume on power bodies",
    5: "growth-exponent dimension of power bodies and half-space",
    6: "profile bracket sanity (order, cone ratio, cylinder plateau)",
    7: "parabola-envelope degeneracy along x",
    8: "smoothing sandwich",
    9: "property suites on the standard bodies",
    10: "closed-form W and the revolution volume sandwich",
    11: "CLI byte-identical output across thread counts",
}

_node_criterion = {}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _node_criterion[item.nodeid] = int(m.args[0])


def pytest_runtest_logreport(report):
    n = _node_criterion.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        ok = report.passed and report.when == "call"
        prev = _outcomes.get(n, True)
        _outcomes[n] = prev and ok


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _node_criterion:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        if n not in _outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if _outcomes[n] else "FAIL"
        tr.write_line(f"criterion {n:2d}: {status:7s} {title}")


@pytest.fixture
def bodies_dir():
    return BODIES


@pytest.fixture
def threads_env(monkeypatch):
    def set_threads(n):
        monkeypatch.setenv("ISOPROF_THREADS", str(n))
    return set_threads
