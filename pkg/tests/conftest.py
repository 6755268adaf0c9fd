import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# --- acceptance summary: one PASS/FAIL line per criterion ---------------------------

_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            n, title = mark.args
            _ACCEPTANCE.setdefault(n, [title, True, 0])
            item.user_properties.append(("acceptance", n))


def pytest_runtest_logreport(report):
    n = dict(report.user_properties).get("acceptance")
    if n is None or report.when not in ("setup", "call"):
        return
    entry = _ACCEPTANCE[n]
    if report.failed:
        entry[1] = False
    if report.when == "call":
        entry[2] += 1


def pytest_terminal_summary(terminalreporter):
    if not any(entry[2] for entry in _ACCEPTANCE.values()):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok, ran = _ACCEPTANCE[n]
        status = "PASS" if ok and ran else ("FAIL" if ran else "NOT RUN")
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}")
