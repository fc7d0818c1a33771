import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from socialfusion import SignalModel

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def two_point():
    return SignalModel([0.9, 0.1], [0.1, 0.9])


def random_model(rng, levels):
    """Random mutually absolutely continuous pmf pair with full support."""
    p0 = rng.dirichlet(np.ones(levels))
    p1 = rng.dirichlet(np.ones(levels))
    p0 = np.maximum(p0, 1e-3)
    p1 = np.maximum(p1, 1e-3)
    p0 /= math.fsum(p0)
    p1 /= math.fsum(p1)
    return SignalModel(p0, p1)


ACCEPTANCE_LINES = {}


def record_acceptance(criterion, ok, detail):
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
    print(ACCEPTANCE_LINES[criterion])
    assert ok, detail


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
