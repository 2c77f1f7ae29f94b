import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gevrey_ns.params import GevreyParams
from gevrey_ns.spectral import make_grid, random_divergence_free_field, random_field

settings.register_profile("gevrey", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "gevrey"))


@pytest.fixture
def params():
    return GevreyParams(a=0.1, sigma=1.5, nu=1.0)


@pytest.fixture
def grid8():
    return make_grid(8)


@pytest.fixture
def grid16():
    return make_grid(16)


def scalar_field(N, seed, slope=-1.0, kmax=None):
    return random_field(N, slope, (1.0, kmax or N / 3), seed)


def velocity(N, seed, slope=-2.0, kmax=None, l2=None):
    u = random_divergence_free_field(N, slope, (1.0, kmax or N / 3), seed)
    if l2 is not None:
        u = u * (l2 / np.sqrt((np.abs(u) ** 2).sum()))
    return u


def shear(N, amplitude=1.0):
    from gevrey_ns.spectral import single_mode_shear

    return single_mode_shear(N, amplitude)
