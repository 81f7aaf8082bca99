from __future__ import annotations

import numpy as np
import pytest

from gammamu import BoundaryGrid, Measure


@pytest.fixture(scope="session")
def lebesgue():
    return Measure.lebesgue()


@pytest.fixture(scope="session")
def dirac_half():
    return Measure.dirac(0.5)


@pytest.fixture(scope="session")
def dirac_03():
    return Measure.dirac(0.3)


@pytest.fixture(scope="session")
def rising_density():
    # dmu = 2(1-t) dt
    return Measure.jacobi(0.0, 1.0, (2.0,))


@pytest.fixture(scope="session")
def grid_256():
    return BoundaryGrid(256)


@pytest.fixture(scope="session")
def grid_8192():
    return BoundaryGrid(8192)


@pytest.fixture()
def rng():
    return np.random.default_rng(13751)
