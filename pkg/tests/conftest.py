import math

import numpy as np
import pytest

from optomech_budget.params import Coupling, MechanicalOscillator, OpticalCavity, silica_at
from optomech_budget.geometry import mode_geometry

TWO_PI = 2 * math.pi


@pytest.fixture(scope="session")
def string_osc():
    return MechanicalOscillator.from_hz(3.7e-15, 8.3e6, 30000)


@pytest.fixture(scope="session")
def beam_osc():
    return MechanicalOscillator.from_hz(5e-16, 50e6, 50000)


@pytest.fixture(scope="session")
def toroid():
    return OpticalCavity.from_hz(850e-9, 60e6, 18e-6, 2e-6)


@pytest.fixture(scope="session")
def silica():
    return silica_at(295.0)


@pytest.fixture(scope="session")
def geom(toroid, silica):
    return mode_geometry(toroid, silica)


@pytest.fixture(scope="session")
def g17():
    return Coupling.from_hz_per_m(17e15)


@pytest.fixture(scope="session")
def g50():
    return Coupling.from_hz_per_m(50e15)


@pytest.fixture(scope="session")
def wide_grid():
    return TWO_PI * np.linspace(1e6, 80e6, 4000)
