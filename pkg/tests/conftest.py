import numpy as np
import pytest

from firank.data import validate_dataset


@pytest.fixture
def planted():
    """n=200, d=15, labels driven by features 3 and 5 (1-based)."""
    rng = np.random.default_rng(7)
    x = rng.normal(size=(200, 15))
    y = (x[:, 2] + 0.5 * x[:, 4] + 0.3 * rng.normal(size=200) > 0).astype(int)
    return validate_dataset(x, y)


def random_dataset(seed, n=40, d=6, ties=False):
    rng = np.random.default_rng(seed)
    if ties:
        x = rng.integers(0, 4, size=(n, d)).astype(float)
    else:
        x = rng.normal(size=(n, d)) * rng.uniform(0.5, 3, size=d) + rng.normal(size=d)
    y = np.zeros(n, dtype=int)
    y[rng.choice(n, size=n // 2, replace=False)] = 1
    x[:, 0] += y * rng.uniform(0, 2)
    return validate_dataset(x, y)


# -- acceptance reporting: one PASS/FAIL line per criterion --------------------

_criteria: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if report.failed:
        _criteria[label] = "FAIL"
    elif report.when == "call" and report.passed:
        _criteria.setdefault(label, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _criteria.items():
        terminalreporter.write_line(f"{status}  [PRIMARY] {label}")
