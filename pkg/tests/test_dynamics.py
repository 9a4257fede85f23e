from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from helpers import rk4_observed_order
from tedhr.attitude import quat_from_euler
from tedhr.dynamics import (
    ExternalWrench,
    RigidBodyState,
    derivative,
    propagate,
    propagate_varying,
    rk4_step,
    saturate,
)
from tedhr.vehicle import force_moment_matrices, hover_input


def test_free_fall_derivative(params, alloc):
    xd = derivative(RigidBodyState(), np.zeros(6), None, params, alloc)
    assert np.allclose(xd[3:6], [0, 0, -params.gravity])
    assert np.allclose(xd[10:13], 0)


def test_principal_spin_has_no_gyroscopic_moment(params, alloc):
    s = RigidBodyState(omega=np.array([0.0, 0.0, 3.0]))
    assert np.allclose(derivative(s, np.zeros(6), None, params, alloc)[10:13], 0)


def test_external_wrench_enters_linearly(params, alloc):
    s = RigidBodyState(q=quat_from_euler([0.2, -0.1, 0.5]))
    base = derivative(s, np.zeros(6), None, params, alloc)
    ext = ExternalWrench(np.array([1.0, 2.0, 3.0]), np.array([0.1, 0.0, -0.2]))
    diff = derivative(s, np.zeros(6), ext, params, alloc) - base
    assert np.allclose(diff[3:6], ext.f_ext / params.mass)
    assert np.allclose(diff[10:13], np.linalg.solve(params.inertia, ext.tau_ext))


def test_free_fall_one_second(params, alloc):
    s = RigidBodyState()
    for _ in range(1000):
        s = rk4_step(s, np.zeros(6), None, 1e-3, params, alloc)
    assert s.v[2] == pytest.approx(-params.gravity, abs=1e-9)
    assert s.p[2] == pytest.approx(-params.gravity / 2, abs=1e-9)


def test_hover_holds_position(params, alloc):
    s = RigidBodyState(p=np.array([1.0, -2.0, 3.0]))
    traj = propagate(s, hover_input(params, alloc), None, 1e-3, 10000, params, alloc)
    assert np.linalg.norm(traj[-1, 0:3] - s.p) < 1e-6


def test_compiled_propagation_matches_python_steps(params, alloc, rng):
    s = RigidBodyState(
        p=rng.standard_normal(3),
        v=rng.standard_normal(3),
        q=quat_from_euler([0.3, 0.2, -1.0]),
        omega=rng.standard_normal(3),
    )
    u = hover_input(params, alloc) * rng.uniform(0.8, 1.2, 6)
    ext = ExternalWrench(np.array([0.5, -0.3, 0.2]), np.array([0.01, 0.0, 0.02]))
    ref = s
    for _ in range(50):
        ref = rk4_step(ref, u, ext, 1e-3, params, alloc)
    traj = propagate(s, u, ext, 1e-3, 50, params, alloc)
    assert np.abs(traj[-1] - ref.to_array()).max() < 1e-12


def test_varying_input_with_constant_samples_matches_held_input(params, alloc):
    s = RigidBodyState(omega=np.array([0.1, -0.2, 0.3]))
    u = hover_input(params, alloc) * np.array([1.1, 0.9, 1.0, 1.05, 0.95, 1.0])
    held = propagate(s, u, None, 1e-3, 40, params, alloc)
    varying = propagate_varying(s, np.tile(u, (81, 1)), None, 1e-3, params, alloc)
    assert np.abs(varying[1:] - held).max() < 1e-13
    with pytest.raises(ValueError):
        propagate_varying(s, np.tile(u, (80, 1)), None, 1e-3, params, alloc)


def test_step_size_is_bounded(params, alloc):
    with pytest.raises(ValueError):
        rk4_step(RigidBodyState(), np.zeros(6), None, 0.02, params, alloc)
    with pytest.raises(ValueError):
        propagate(RigidBodyState(), np.zeros(6), None, 0.0, 5, params, alloc)


def test_free_fall_conserves_energy(params, alloc):
    s = RigidBodyState(v=np.array([2.0, -1.0, 4.0]), omega=np.array([0.5, 0.2, -0.3]))
    traj = propagate(s, np.zeros(6), None, 1e-3, 5000, params, alloc)
    m, g = params.mass, params.gravity
    energy = 0.5 * m * np.sum(traj[:, 3:6] ** 2, axis=1) + m * g * traj[:, 2]
    e0 = 0.5 * m * s.v @ s.v
    assert np.abs(energy - e0).max() < 1e-6


def test_untilted_symmetric_hover_keeps_yaw_momentum(params):
    flat = replace(params, alpha=0.0, beta=0.0)
    F, M = force_moment_matrices(flat)
    al = SimpleNamespace(F=F, M=M)
    u = np.full(6, flat.weight / (6 * flat.c_f))
    traj = propagate(RigidBodyState(), u, None, 1e-3, 2000, flat, al)
    h_z = (traj[:, 10:13] @ flat.inertia)[:, 2]
    assert np.abs(h_z).max() < 1e-10


def test_quaternion_stays_unit(params, alloc):
    s = RigidBodyState(omega=np.array([3.0, -2.0, 5.0]))
    traj = propagate(s, np.zeros(6), None, 1e-3, 60000, params, alloc)
    assert np.abs(np.linalg.norm(traj[:, 6:10], axis=1) - 1).max() < 1e-9
    assert np.all(traj[:, 6] >= 0)


def test_rk4_self_convergence(params, alloc):
    assert rk4_observed_order(params, alloc) >= 3.5


def test_saturation_examples():
    two_pi = 2 * np.pi
    u, rep = saturate(np.array([-1.0, 0, 0, 0, 0, 0]))
    assert u[0] == 0 and rep.excess_hz == 0
    u, rep = saturate(np.full(6, (two_pi * 85.0) ** 2))
    assert np.allclose(np.sqrt(u) / two_pi, 83.5)
    assert rep.max_rate_hz == pytest.approx(85.0)
    assert rep.excess_hz == pytest.approx(1.5)
    u_in = np.full(6, (two_pi * 40.0) ** 2)
    u, rep = saturate(u_in)
    assert np.array_equal(u, u_in) and rep.excess_hz == 0


def test_state_array_round_trip(rng):
    x = rng.standard_normal(13)
    assert np.array_equal(RigidBodyState.from_array(x).to_array(), x)
