import pytest

from cdss import msr
from cdss.gf import GF, Matrix

# Worked-example encoding matrix over GF(2^3), x^3 + x + 1.
EQ12_ROWS = [
    [7, 2, 3, 4],
    [2, 7, 4, 3],
    [3, 4, 7, 2],
    [4, 3, 2, 7],
]


@pytest.fixture(scope="session")
def gf8():
    return GF(3)


@pytest.fixture(scope="session")
def gf32():
    return GF(5)


@pytest.fixture(scope="session")
def gf256():
    return GF(8)


@pytest.fixture(scope="session")
def eq12(gf8):
    return Matrix.from_rows(gf8, EQ12_ROWS)


@pytest.fixture(scope="session")
def msr_k2(gf8):
    return msr.build(2, gf8)


@pytest.fixture(scope="session")
def msr_k3(gf32):
    return msr.build(3, gf32)
