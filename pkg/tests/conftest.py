import numpy as np
import pytest

from homog1d import funcspec as fs


@pytest.fixture(scope="session")
def model_coefficient():
    """Asymmetric oscillation 1/a = 2 + sin 2 pi x (harmonic mean 1/2)."""
    return fs.PeriodicCoefficient(fs.TrigSeries(2.0, sin_coeffs=[1.0]),
                                  profile_is_reciprocal=True)


@pytest.fixture(scope="session")
def symmetric_coefficient():
    """Symmetric oscillation 1/a = 2 + cos 2 pi x (both moments vanish)."""
    return fs.PeriodicCoefficient(fs.TrigSeries(2.0, cos_coeffs=[1.0]),
                                  profile_is_reciprocal=True)


@pytest.fixture(scope="session")
def unit_coefficient():
    return fs.PeriodicCoefficient(fs.Constant(1.0))


@pytest.fixture(scope="session")
def one():
    return fs.Constant(1.0)


@pytest.fixture(scope="session")
def sine_source():
    """f(x) = sin(pi x); vanishes at both endpoints."""
    return fs.TrigSeries(0.0, sin_coeffs=[1.0], base_frequency=np.pi)


@pytest.fixture(scope="session")
def balanced_source():
    """f(x) = x^2 - x + 1/6; both int f and int int f vanish on [0, 1]."""
    return fs.Polynomial([1.0 / 6.0, -1.0, 1.0])
