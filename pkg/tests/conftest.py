import numpy as np
import pytest

from qkmeans.backend import get_profile

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, text): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = dict(report.user_properties).get("acceptance")
    if marker is None:
        return
    n, text = marker
    prev = _acceptance.get(n, (text, True))
    _acceptance[n] = (text, prev[1] and report.passed)


@pytest.hookimpl(tryfirst=True)
def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            item.user_properties.append(("acceptance", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        text, ok = _acceptance[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ideal():
    return get_profile("ideal")


@pytest.fixture
def seven():
    return get_profile("seven-qubit")
