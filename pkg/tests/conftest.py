import numpy as np
import pytest
from hypothesis import settings

from tedhr.vehicle import VehicleParams, build_allocation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return VehicleParams()


@pytest.fixture(scope="session")
def alloc(params):
    return build_allocation(params)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit_quats(rng, n):
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return np.where(q[:, :1] < 0, -q, q)


def random_euler(rng, n, max_pitch_deg=80.0):
    d = np.empty((n, 3))
    d[:, 0] = rng.uniform(-np.pi, np.pi, n)
    d[:, 1] = rng.uniform(-1, 1, n) * np.deg2rad(max_pitch_deg)
    d[:, 2] = rng.uniform(-np.pi, np.pi, n)
    return d
