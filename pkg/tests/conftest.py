import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rdcontrol.model import BistableNonlinearity, DomainGeometry, DriftField


@pytest.fixture(scope="session")
def nl033():
    return BistableNonlinearity.cubic(0.33)


@pytest.fixture(scope="session")
def homog():
    return DriftField.homogeneous()


@pytest.fixture(scope="session")
def gauss_out():
    return DriftField.radial("gauss_out", 1.0)


@pytest.fixture(scope="session")
def interval_25():
    return DomainGeometry.interval(2.5)


@pytest.fixture(scope="session")
def interval_1():
    return DomainGeometry.interval(1.0)
