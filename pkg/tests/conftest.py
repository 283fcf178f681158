import numpy as np
import pytest

from weakkam.model import SATURATING, make_model

E1_L0 = [[0.0, -1.0], [2.0, 1.0]]
E2_L0 = [[0.0, 2.0], [3.0, 0.0]]


@pytest.fixture
def e1():
    return make_model(E1_L0, alpha=[1, 1], beta=[0, 0])


@pytest.fixture
def e2():
    return make_model(E2_L0, alpha=[1, 1], beta=[0, 0])


@pytest.fixture
def e2_bad():
    return make_model(E2_L0, alpha=[1, 0])


@pytest.fixture
def e1_sat():
    return make_model(E1_L0, alpha=[1, 1], variant=SATURATING, scale=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "REPORT", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
