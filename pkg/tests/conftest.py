import math

import numpy as np
import pytest

from dnobloch import BathymetryProfile


def sech(x):
    return 1.0 / math.cosh(x)


@pytest.fixture
def cosx():
    return BathymetryProfile.preset("cosx", h=1.0, eps=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
