"""Shared fixtures; the expensive instances are built once per session."""

import numpy as np
import pytest

from modelspace.covering import build_covering
from modelspace.geometry import SublevelDistance
from modelspace.inner import InnerFunction

EPS = 0.5


@pytest.fixture(scope="session")
def pw_theta():
    """Paley-Wiener instance exp(2 pi i z) (type pi)."""
    return InnerFunction.paley_wiener(np.pi)


@pytest.fixture(scope="session")
def single_zero_theta():
    return InnerFunction.from_zeros([1j])


@pytest.fixture(scope="session")
def two_zero_theta():
    return InnerFunction.from_zeros([1j, 4 + 2j], tau=0.3)


@pytest.fixture(scope="session")
def geometric_theta():
    """Zeros 2^n i, n = 0..15: the sublevel set is a Stolz-type angle."""
    return InnerFunction.from_zeros([(2.0 ** n) * 1j for n in range(16)])


@pytest.fixture(scope="session")
def pw_covering(pw_theta):
    return build_covering(pw_theta, EPS, 1.0, (-10, 10))


@pytest.fixture(scope="session")
def unit_covering():
    """Exponential instance tuned so every interval has length exactly 1."""
    th = InnerFunction(tau=np.log(2.0))
    return th, build_covering(th, EPS, 1.0, (-8, 8))


@pytest.fixture(scope="session")
def pw_distance(pw_theta):
    return SublevelDistance(pw_theta, EPS, window=(-10, 10))


@pytest.fixture(scope="session")
def geometric_covering(geometric_theta):
    return build_covering(geometric_theta, EPS, 4.0, (-1e4, 1e4))
