import numpy as np
import pytest

from boxlab.boxes import Box


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_bd_value(box: Box) -> float:
    """B^d by explicit loops over (a, b, x, y), independent of the tensor code."""
    d = box.d_a
    total = 0.0
    for a in range(d):
        for b in range(d):
            for x in range(d):
                for y in range(d):
                    if (a - b - x * y) % d == 0:
                        total += box.probs[a, b, x, y]
    return total / d**2


def pytest_configure(config):
    config._criteria = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = getattr(config, "_criteria", [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, msg in sorted(rows):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {msg}")
