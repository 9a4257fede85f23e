"""Shared oracles and rigs for the unit and acceptance tests."""

import numpy as np
from scipy.integrate import solve_ivp

from tedhr.attitude import geodesic_distance, quat_from_euler, quat_kinematics, quat_normalize, rotation_of
from tedhr.dynamics import RigidBodyState, propagate, propagate_varying
from tedhr.flatness import FlatPoint, flat_to_input, flat_to_state
from tedhr.hc import HcState, desired_dynamics, force_mismatch, preferential_direction, reference_force
from tedhr.vehicle import hover_input

# smooth circle with a slow vertical wave, plus roll/pitch/yaw sinusoids
_AMP = np.array([2.0, 2.0, 0.3, 0.12, 0.10, 0.6])
_FREQ = np.array([0.6, 0.6, 0.5, 0.7, 0.9, 0.4])
_PHASE = np.array([0.0, np.pi / 2, 0.0, 0.0, 0.3, 0.0])
_OFFSET = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.2])


def smooth_flat(t):
    """Flat output ``(p, delta)`` and two derivatives along a smooth test path."""
    t = np.asarray(t, dtype=float)[..., None]
    a = _FREQ * t + _PHASE
    return FlatPoint(_OFFSET + _AMP * np.sin(a), _AMP * _FREQ * np.cos(a), -_AMP * _FREQ**2 * np.sin(a))


def flatness_round_trip(params, alloc, duration=10.0, dt=1e-4):
    """Open-loop flight on the flatness input; returns max (position m, attitude deg) errors."""
    n = int(round(duration / dt))
    u_half = flat_to_input(smooth_flat(np.arange(2 * n + 1) * dt / 2), alloc, params)
    x0 = flat_to_state(smooth_flat(0.0))
    s0 = RigidBodyState(x0[0:3], x0[3:6], quat_from_euler(x0[6:9]), x0[9:12])
    traj = propagate_varying(s0, u_half, None, dt, params, alloc)
    ref = smooth_flat(np.arange(n + 1) * dt)
    e_p = np.linalg.norm(traj[:, 0:3] - ref.y[:, 0:3], axis=1).max()
    e_a = np.rad2deg(geodesic_distance(traj[:, 6:10], quat_from_euler(ref.y[:, 3:6]))).max()
    return float(e_p), float(e_a)


def rk4_observed_order(params, alloc, T=1.0):
    """Self-convergence order of the integrator on a spin-up manoeuvre from rest."""
    u = hover_input(params, alloc) * np.array([1.3, 0.7, 1.2, 0.8, 1.25, 0.75])
    s0 = RigidBodyState(omega=np.array([0.5, -0.4, 0.8]))

    def final(dt):
        return propagate(s0, u, None, dt, int(round(T / dt)), params, alloc)[-1]

    h = 0.01
    ref = final(h / 10)
    e1 = np.linalg.norm(final(h) - ref)
    e2 = np.linalg.norm(final(h / 2) - ref)
    return float(np.log2(e1 / e2))


E3 = np.array([0.0, 0.0, 1.0])


def vertical_reference(t):
    """Reference with vertical acceleration and jerk only, so d* stays e3 at level attitude."""
    a, w = 1.5, 2.0
    p = np.array([0.0, 0.0, 1.0 + a / w**2 * (1 - np.cos(w * t))])
    v = np.array([0.0, 0.0, a / w * np.sin(w * t)])
    acc = np.array([0.0, 0.0, a * np.cos(w * t)])
    jerk = np.array([0.0, 0.0, -a * w * np.sin(w * t)])
    return p, v, acc, jerk


def contraction_rig(params, gains, hc0, e_p0, e_v0, t_end, virtual_input_fn, q_r=None, n_eval=400):
    """Outer loop with a perfect inner loop: the vehicle attitude is pinned to q_d.

    The body then receives exactly the desired force ``R(q_d) d* f_c`` and the
    internal state ``(f_c, q_d)`` evolves continuously.  Returns times and
    ``||f_delta(t)||``.
    """
    q_r = np.array([1.0, 0.0, 0.0, 0.0]) if q_r is None else q_r
    m = params.mass

    def unpack(t, z):
        p_r, v_r, a_r, j_r = vertical_reference(t)
        e_p, e_v = z[0:3] - p_r, z[3:6] - v_r
        hc = HcState(z[6], quat_normalize(z[7:11]))
        d_star = preferential_direction(q_r, a_r, params)
        f_r = reference_force(e_p, e_v, a_r, gains, params)
        return e_p, e_v, hc, d_star, f_r, j_r

    def rhs(t, z):
        e_p, e_v, hc, d_star, f_r, j_r = unpack(t, z)
        f_delta = force_mismatch(hc, d_star, f_r)
        nu = virtual_input_fn(e_p, e_v, f_delta, j_r, gains, params)
        omega_d, f_c_dot = desired_dynamics(hc, nu, d_star, q_r, gains)
        force = rotation_of(hc.q_d) @ d_star * hc.f_c
        acc = force / m - params.gravity * E3
        return np.concatenate([z[3:6], acc, [f_c_dot], quat_kinematics(hc.q_d, omega_d)])

    p_r, v_r, _, _ = vertical_reference(0.0)
    z0 = np.concatenate([p_r + e_p0, v_r + e_v0, [hc0.f_c], hc0.q_d])
    t_eval = np.linspace(0.0, t_end, n_eval)
    sol = solve_ivp(rhs, (0.0, t_end), z0, t_eval=t_eval, rtol=1e-10, atol=1e-10, method="DOP853")
    norms = []
    for t, z in zip(sol.t, sol.y.T):
        e_p, e_v, hc, d_star, f_r, _ = unpack(t, z)
        norms.append(np.linalg.norm(force_mismatch(hc, d_star, f_r)))
    return sol.t, np.array(norms)


def random_mismatch(rng, params):
    """Random initial controller state and tracking errors."""
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    ang = np.deg2rad(rng.uniform(2, 20))
    q_d = np.concatenate([[np.cos(ang / 2)], np.sin(ang / 2) * axis])
    f_c = params.weight * rng.uniform(0.7, 1.3)
    return HcState(f_c, q_d), rng.uniform(-0.3, 0.3, 3), rng.uniform(-0.3, 0.3, 3)


def ramp_yaw_errors(record, scenario_cfg):
    """Mean yaw error (deg) over the second half of each ramp window."""
    err = (record.euler_deg[:, 2] - record.euler_r_deg[:, 2] + 180.0) % 360.0 - 180.0
    out = []
    for start, end, _ in scenario_cfg.ramp_windows():
        m = (record.t >= 0.5 * (start + end)) & (record.t < end)
        out.append(float(np.mean(err[m])))
    return out
