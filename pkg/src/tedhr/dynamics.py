"""Rigid-body truth model with actuator saturation and a fixed-step RK4."""

from dataclasses import dataclass, field

import numba
import numpy as np

from .attitude import IDENTITY, cross, quat_kinematics, quat_normalize, rotation_of
from .errors import NonFinite

MAX_DT = 0.01


@dataclass
class RigidBodyState:
    p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q: np.ndarray = field(default_factory=lambda: IDENTITY.copy())
    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def to_array(self):
        return np.concatenate([self.p, self.v, self.q, self.omega])

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[0:3].copy(), x[3:6].copy(), x[6:10].copy(), x[10:13].copy())

    def copy(self):
        return RigidBodyState.from_array(self.to_array())


@dataclass
class ExternalWrench:
    """Force in the world frame and moment in the body frame."""

    f_ext: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tau_ext: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True)
class SaturationReport:
    max_rate_hz: float
    excess_hz: float


def saturate(u_raw, rate_max=83.5):
    """Clamp squared rates to the rotor limits.

    Returns the admissible input and a report holding the largest commanded
    rate (Hz, before clamping) and its excess over ``rate_max``.
    """
    u_raw = np.asarray(u_raw, dtype=float)
    rates = np.sqrt(np.maximum(u_raw, 0.0)) / (2.0 * np.pi)
    max_rate = float(rates.max())
    u = np.clip(u_raw, 0.0, (2.0 * np.pi * rate_max) ** 2)
    return u, SaturationReport(max_rate, max(0.0, max_rate - rate_max))


def derivative(state, u, ext, params, alloc):
    """Time derivative of the state as a 13-vector ``(p, v, q, omega)``."""
    x = state.to_array() if isinstance(state, RigidBodyState) else np.asarray(state, dtype=float)
    if ext is None:
        ext = ExternalWrench()
    v, q, omega = x[3:6], x[6:10], x[10:13]
    J = params.inertia
    g = params.gravity
    acc = (rotation_of(q) @ (alloc.F @ u) + ext.f_ext) / params.mass
    acc[2] -= g
    omega_dot = np.linalg.solve(J, -cross(omega, J @ omega) + alloc.M @ u + ext.tau_ext)
    return np.concatenate([v, acc, quat_kinematics(q, omega), omega_dot])


def rk4_step(state, u, ext, dt, params, alloc):
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}]")
    x = state.to_array()
    k1 = derivative(x, u, ext, params, alloc)
    k2 = derivative(x + 0.5 * dt * k1, u, ext, params, alloc)
    k3 = derivative(x + 0.5 * dt * k2, u, ext, params, alloc)
    k4 = derivative(x + dt * k3, u, ext, params, alloc)
    x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(x)):
        raise NonFinite("state diverged to a non-finite value")
    x[6:10] = quat_normalize(x[6:10])
    return RigidBodyState.from_array(x)


@numba.njit(cache=True)
def _deriv(x, force_body, moment, f_ext, tau_ext, mass, g, J, J_inv, out):
    w, qx, qy, qz = x[6], x[7], x[8], x[9]
    p_, q_, r_ = x[10], x[11], x[12]
    fx, fy, fz = force_body[0], force_body[1], force_body[2]
    # R(q) @ force_body
    ax = (1 - 2 * (qy * qy + qz * qz)) * fx + 2 * (qx * qy - w * qz) * fy + 2 * (qx * qz + w * qy) * fz
    ay = 2 * (qx * qy + w * qz) * fx + (1 - 2 * (qx * qx + qz * qz)) * fy + 2 * (qy * qz - w * qx) * fz
    az = 2 * (qx * qz - w * qy) * fx + 2 * (qy * qz + w * qx) * fy + (1 - 2 * (qx * qx + qy * qy)) * fz
    out[0] = x[3]
    out[1] = x[4]
    out[2] = x[5]
    out[3] = (ax + f_ext[0]) / mass
    out[4] = (ay + f_ext[1]) / mass
    out[5] = (az + f_ext[2]) / mass - g
    out[6] = -0.5 * (qx * p_ + qy * q_ + qz * r_)
    out[7] = 0.5 * (w * p_ + (qy * r_ - qz * q_))
    out[8] = 0.5 * (w * q_ + (qz * p_ - qx * r_))
    out[9] = 0.5 * (w * r_ + (qx * q_ - qy * p_))
    hx = J[0, 0] * p_ + J[0, 1] * q_ + J[0, 2] * r_
    hy = J[1, 0] * p_ + J[1, 1] * q_ + J[1, 2] * r_
    hz = J[2, 0] * p_ + J[2, 1] * q_ + J[2, 2] * r_
    tx = -(q_ * hz - r_ * hy) + moment[0] + tau_ext[0]
    ty = -(r_ * hx - p_ * hz) + moment[1] + tau_ext[1]
    tz = -(p_ * hy - q_ * hx) + moment[2] + tau_ext[2]
    for i in range(3):
        out[10 + i] = J_inv[i, 0] * tx + J_inv[i, 1] * ty + J_inv[i, 2] * tz


@numba.njit(cache=True)
def _propagate(x0, force_body, moment, f_ext, tau_ext, mass, g, J, J_inv, dt, n):
    traj = np.empty((n, 13))
    x = x0.copy()
    k1 = np.empty(13)
    k2 = np.empty(13)
    k3 = np.empty(13)
    k4 = np.empty(13)
    for step in range(n):
        _deriv(x, force_body, moment, f_ext, tau_ext, mass, g, J, J_inv, k1)
        _deriv(x + 0.5 * dt * k1, force_body, moment, f_ext, tau_ext, mass, g, J, J_inv, k2)
        _deriv(x + 0.5 * dt * k2, force_body, moment, f_ext, tau_ext, mass, g, J, J_inv, k3)
        _deriv(x + dt * k3, force_body, moment, f_ext, tau_ext, mass, g, J, J_inv, k4)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        nq = np.sqrt(x[6] ** 2 + x[7] ** 2 + x[8] ** 2 + x[9] ** 2)
        sign = -1.0 if x[6] < 0.0 else 1.0
        for i in range(6, 10):
            x[i] = sign * x[i] / nq
        traj[step] = x
    return traj


def propagate(state, u, ext, dt, n, params, alloc, J_inv=None):
    """``n`` RK4 steps with ``u`` and ``ext`` held; returns an (n, 13) array.

    Compiled equivalent of calling :func:`rk4_step` ``n`` times.  Pass
    ``J_inv`` to skip inverting the inertia on every call.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}]")
    x0 = state.to_array() if isinstance(state, RigidBodyState) else np.asarray(state, dtype=float)
    if ext is None:
        ext = ExternalWrench()
    J = np.ascontiguousarray(params.inertia, dtype=float)
    traj = _propagate(
        np.ascontiguousarray(x0, dtype=float),
        alloc.F @ u,
        alloc.M @ u,
        np.asarray(ext.f_ext, dtype=float),
        np.asarray(ext.tau_ext, dtype=float),
        float(params.mass),
        float(params.gravity),
        J,
        np.linalg.inv(J) if J_inv is None else J_inv,
        float(dt),
        int(n),
    )
    if not np.all(np.isfinite(traj[-1])):
        raise NonFinite("state diverged to a non-finite value")
    return traj


@numba.njit(cache=True)
def _propagate_varying(x0, forces, moments, f_ext, tau_ext, mass, g, J, J_inv, dt):
    n = (forces.shape[0] - 1) // 2
    traj = np.empty((n + 1, 13))
    traj[0] = x0
    x = x0.copy()
    k1 = np.empty(13)
    k2 = np.empty(13)
    k3 = np.empty(13)
    k4 = np.empty(13)
    for step in range(n):
        a, m, b = 2 * step, 2 * step + 1, 2 * step + 2
        _deriv(x, forces[a], moments[a], f_ext, tau_ext, mass, g, J, J_inv, k1)
        _deriv(x + 0.5 * dt * k1, forces[m], moments[m], f_ext, tau_ext, mass, g, J, J_inv, k2)
        _deriv(x + 0.5 * dt * k2, forces[m], moments[m], f_ext, tau_ext, mass, g, J, J_inv, k3)
        _deriv(x + dt * k3, forces[b], moments[b], f_ext, tau_ext, mass, g, J, J_inv, k4)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        nq = np.sqrt(x[6] ** 2 + x[7] ** 2 + x[8] ** 2 + x[9] ** 2)
        sign = -1.0 if x[6] < 0.0 else 1.0
        for i in range(6, 10):
            x[i] = sign * x[i] / nq
        traj[step + 1] = x
    return traj


def propagate_varying(state, u_half, ext, dt, params, alloc):
    """RK4 under a time-varying input sampled on the half-step grid.

    ``u_half`` has shape ``(2 n + 1, 6)``: row ``2 k`` is the input at step
    ``k`` and row ``2 k + 1`` the input half a step later.  Returns the
    ``(n + 1, 13)`` trajectory including the initial state.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}]")
    u_half = np.asarray(u_half, dtype=float)
    if u_half.ndim != 2 or u_half.shape[1] != 6 or u_half.shape[0] % 2 != 1:
        raise ValueError("u_half must have shape (2 n + 1, 6)")
    x0 = state.to_array() if isinstance(state, RigidBodyState) else np.asarray(state, dtype=float)
    if ext is None:
        ext = ExternalWrench()
    J = np.ascontiguousarray(params.inertia, dtype=float)
    traj = _propagate_varying(
        np.ascontiguousarray(x0, dtype=float),
        np.ascontiguousarray(u_half @ alloc.F.T),
        np.ascontiguousarray(u_half @ alloc.M.T),
        np.asarray(ext.f_ext, dtype=float),
        np.asarray(ext.tau_ext, dtype=float),
        float(params.mass),
        float(params.gravity),
        J,
        np.linalg.inv(J),
        float(dt),
    )
    if not np.all(np.isfinite(traj[-1])):
        raise NonFinite("state diverged to a non-finite value")
    return traj
