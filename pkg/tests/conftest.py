import numpy as np
import pytest

from treestars.distributions import CostSpec, Pmf
from treestars.model import ModelParams, ScenarioWeights

DET_OFFSPRING = Pmf([0, 0, 1])
RAND_OFFSPRING = Pmf([0, 0.4, 0.6])
DET_USERS = Pmf([0, 0, 0, 0, 1])
RAND_USERS = Pmf([0, 0.1, 0.2, 0.3, 0.4])

TOPOLOGY = {
    "I": (CostSpec.lognormal(10000, 0), CostSpec.lognormal(1000, 0)),
    "II": (CostSpec.lognormal(10000, 5000), CostSpec.lognormal(1000, 0)),
    "III": (CostSpec.lognormal(10000, 0), CostSpec.lognormal(1000, 500)),
}


def make_params(offspring=DET_OFFSPRING, users=DET_USERS, radius=2, p=0.8, q=0.8, topology="I", weights=None, **kw):
    cc, cu = TOPOLOGY[topology]
    return ModelParams(offspring, users, radius, p, q, cc, cu, weights=weights or ScenarioWeights.only(1), **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def row1():
    """Deterministic binary tree, 4 users per contract, p = q = 0.8, point costs."""
    return make_params()


# one line per acceptance criterion, shown after the test run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
