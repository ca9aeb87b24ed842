import random

import pytest

from maniac.ff_tower import FieldTower, PrimeField


@pytest.fixture(scope="session")
def f4():
    # F_4 = F_2[x]/(x^2 + x + 1)
    return FieldTower(2, [2], moduli=[[1, 1, 1]])


@pytest.fixture(scope="session")
def tower_2_33():
    return FieldTower(2, [3, 3], seed=0)


@pytest.fixture(scope="session")
def tower_3_22():
    return FieldTower(3, [2, 2], seed=1)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def gf251():
    return PrimeField(251)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
