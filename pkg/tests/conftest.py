import math

import numpy as np
import pytest

from kuramoto_landscape.model import ModelConfig
from kuramoto_landscape.patterns import MemoryPair, TernaryPoint

XI1 = (1, 1, 1, -1, -1, -1)
XI2 = (1, 1, 1, 1, 1, -1)
MIDPOINT = TernaryPoint((0, 0, 0, 1, 1, 2))


@pytest.fixture(scope="session")
def pair():
    return MemoryPair.from_lists(XI1, XI2)


@pytest.fixture(scope="session")
def cfg(pair):
    return ModelConfig(pair, 0.3)


@pytest.fixture(scope="session")
def ref_census(cfg):
    from kuramoto_landscape.landscape import census, shift_equivalence_scan
    return shift_equivalence_scan(census(cfg))


@pytest.fixture(scope="session")
def ref_graph(cfg, ref_census):
    from kuramoto_landscape.landscape import transition_graph
    return transition_graph(cfg, ref_census)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def orthogonal_pair(rng, n):
    """Random pair with |I1| = |I2| = n/2."""
    from kuramoto_landscape.patterns import random_pair
    return random_pair(rng, n, n // 2)


TWO_PI = 2 * math.pi


ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    """Remember one acceptance verdict; printed again in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
