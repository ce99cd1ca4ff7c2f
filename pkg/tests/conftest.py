import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from molagent.runner import bundled_seed_file  # noqa: E402


@pytest.fixture(scope="session")
def corpus() -> list[str]:
    return bundled_seed_file().read_text().split()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance gate reporting --------------------------------------------------

_GATE: dict[int, tuple[str, str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when == "teardown":
        return
    n, title = mark.args
    details = [str(v) for k, v in item.user_properties if k == "detail"]
    prev = _GATE.get(n)
    if rep.failed:
        _GATE[n] = ("FAIL", title, (prev[2] if prev else []) + details)
    elif rep.when == "call":
        status = prev[0] if prev else "PASS"
        _GATE[n] = (status, title, (prev[2] if prev else []) + details)


def pytest_terminal_summary(terminalreporter):
    if not _GATE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_GATE):
        status, title, details = _GATE[n]
        extra = f"  [{'; '.join(details)}]" if details else ""
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}{extra}")
