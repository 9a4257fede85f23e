import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tedhr.attitude import quat_from_euler
from tedhr.dynamics import RigidBodyState
from tedhr.errors import ConfigError, OutOfLayer
from tedhr.wind import (
    ShapingFilter,
    WindConfig,
    WindField,
    air_density,
    dryden_parameters,
    gust_velocity,
    shear_velocity,
    wind_force,
)

CFG = WindConfig()


def test_shear_anchor_point():
    assert np.array_equal(shear_velocity(6.0, CFG), [10.0, 0.0, 0.0])


def test_shear_vanishes_below_roughness():
    assert np.array_equal(shear_velocity(0.15, CFG), np.zeros(3))
    assert np.array_equal(shear_velocity(0.05, CFG), np.zeros(3))


def test_shear_log_profile_ratio():
    ratio = shear_velocity(3.0, CFG)[0] / shear_velocity(6.0, CFG)[0]
    assert ratio == pytest.approx(np.log(3 / 0.15) / np.log(6 / 0.15), rel=1e-15)
    assert ratio == pytest.approx(0.812, abs=1e-3)


def test_gust_profile():
    assert np.array_equal(gust_velocity(24.9, CFG), np.zeros(3))
    assert np.array_equal(gust_velocity(27.0, CFG), [2.0, 2.0, 1.0])
    assert np.allclose(gust_velocity(26.0, CFG), [1.0, 1.0, 0.5], atol=1e-15)
    assert np.array_equal(gust_velocity(40.0, CFG), [2.0, 2.0, 1.0])


@pytest.mark.parametrize(
    "h, rho",
    # standard-atmosphere table values
    [(0.0, 1.225), (1000.0, 1.1117), (5000.0, 0.7364), (11000.0, 0.3639)],
)
def test_air_density_against_standard_table(h, rho):
    assert air_density(h) == pytest.approx(rho, rel=5e-4)


def test_air_density_near_ground():
    assert air_density(0.0) == 1.225
    assert 1 - air_density(1.0) / air_density(0.0) == pytest.approx(1e-4, rel=0.1)
    h = np.linspace(0, 100, 201)
    assert np.all(np.diff([air_density(x) for x in h]) < 0)
    with pytest.raises(OutOfLayer):
        air_density(12000.0)


def test_wind_force_area_interpolation():
    s = RigidBodyState(p=np.array([0.0, 0.0, 0.0]))
    rho = air_density(0.0)
    assert np.array_equal(wind_force(np.zeros(3), s, CFG), np.zeros(3))
    axial = np.array([0.0, 0.0, -3.0])
    assert np.allclose(wind_force(axial, s, CFG), rho * 0.885 * axial)
    lateral = np.array([3.0, -1.0, 0.0])
    assert np.allclose(wind_force(lateral, s, CFG), rho * 0.111 * lateral)
    # the body axis, not the world vertical, sets the area
    tilted = RigidBodyState(q=quat_from_euler([np.pi / 2, 0.0, 0.0]))
    assert np.allclose(wind_force(np.array([0.0, -2.0, 0.0]), tilted, CFG), rho * 0.885 * np.array([0, -2.0, 0]))


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_area_stays_between_bounds(wx, wy, wz):
    w = np.array([wx, wy, wz])
    s = RigidBodyState(q=quat_from_euler([0.3, -0.2, 1.0]))
    f = wind_force(w, s, CFG)
    speed = np.linalg.norm(w)
    if speed > 1e-6:
        area = np.linalg.norm(f) / (air_density(0.0) * speed)
        assert 0.111 - 1e-12 <= area <= 0.885 + 1e-12


def test_still_air_force_is_self_induced_drag():
    s = RigidBodyState(v=np.array([1.0, 0.0, 0.0]))
    assert np.allclose(wind_force(np.zeros(3), s, CFG), -air_density(0.0) * 0.111 * s.v)
    assert np.array_equal(wind_force(np.zeros(3), RigidBodyState(), CFG), np.zeros(3))


def test_quadratic_drag_option():
    cfg = WindConfig(drag_law="quadratic")
    s = RigidBodyState()
    w = np.array([4.0, 0.0, 0.0])
    assert np.allclose(wind_force(w, s, cfg), 0.5 * air_density(0.0) * 0.111 * 4.0 * w)
    with pytest.raises(ConfigError):
        WindConfig(drag_law="cubic")


def test_dryden_low_altitude_parameters():
    (su, sv, sw), (lu, lv, lw) = dryden_parameters(6.0, 10.0)
    h_ft = 6.0 / 0.3048
    assert sw == pytest.approx(1.0)
    assert su == pytest.approx(1.0 / (0.177 + 0.000823 * h_ft) ** 0.4)
    assert lw == pytest.approx(6.0)
    assert lu == pytest.approx(h_ft / (0.177 + 0.000823 * h_ft) ** 1.2 * 0.3048)
    assert su == sv and lu == lv


def test_first_order_filter_has_exponential_memory():
    f = ShapingFilter(1, 1.3, 20.0, 10.0, 0.01)
    assert f.Ad[0, 0] == pytest.approx(np.exp(-0.01 * 10.0 / 20.0), rel=1e-12)
    assert float(f.C @ f.P_stat @ f.C) == pytest.approx(1.3**2, rel=1e-10)


@pytest.mark.parametrize("order, sigma, L", [(1, 1.5, 23.0), (2, 1.0, 3.0)])
def test_filter_variance_over_a_long_path(order, sigma, L):
    f = ShapingFilter(order, sigma, L, 10.0, 0.01)
    noise = np.random.default_rng(7).standard_normal((1_000_000, order))
    y = f.path(noise)[5000:]
    assert np.var(y) == pytest.approx(sigma**2, rel=0.10)


def test_block_path_matches_step_recursion():
    f = ShapingFilter(2, 1.0, 5.0, 10.0, 0.01)
    noise = np.random.default_rng(3).standard_normal((500, 2))
    x, ys = np.zeros(2), []
    for n in noise:
        x, y = f.step(x, n)
        ys.append(y)
    assert np.abs(f.path(noise) - ys).max() < 1e-12


def test_zero_intensity_turbulence_is_silent():
    f = ShapingFilter(1, 0.0, 20.0, 10.0, 0.01)
    x, y = f.step(np.zeros(1), np.ones(1))
    assert y == 0.0
    field = WindField(WindConfig(reference_speed=0.0, shear=False, gust=False), np.random.default_rng(0), 0.01, 1.0)
    assert all(np.array_equal(field.update(0.01 * k, 1.0), np.zeros(3)) for k in range(50))


def test_wind_field_is_deterministic_per_seed():
    def series(seed):
        field = WindField(CFG, np.random.default_rng(seed), 0.01, 1.0)
        return np.array([field.update(0.01 * k, 1.0) for k in range(3000)])

    a, b = series(5), series(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, series(6))


def test_components_add_up():
    cfg = WindConfig()
    full = WindField(cfg, np.random.default_rng(2), 0.01, 1.0)
    turb = WindField(WindConfig(shear=False, gust=False), np.random.default_rng(2), 0.01, 1.0)
    for k in range(0, 3000, 7):
        t = 0.01 * k
        w_full = full.update(t, 1.0)
        w_turb = turb.update(t, 1.0)
        assert np.allclose(w_full, shear_velocity(1.0, cfg) + w_turb + gust_velocity(t, cfg), atol=1e-14)


def test_default_turbulence_runs_along_x_only():
    field = WindField(WindConfig(shear=False, gust=False), np.random.default_rng(1), 0.01, 1.0)
    w = np.array([field.update(0.01 * k, 1.0) for k in range(200)])
    assert np.any(w[:, 0] != 0) and np.all(w[:, 1:] == 0)
