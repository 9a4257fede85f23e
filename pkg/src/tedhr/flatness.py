"""Differential-flatness maps between the pose trajectory and the vehicle.

State ``x = (p, v, delta, omega)`` (12), flat output ``y = (p, delta)`` (6),
flat input ``mu`` (6): world-frame force then body moment, so that
``x_dot = A(x) x + B mu - g``.  All maps broadcast over leading dimensions.
"""

from dataclasses import dataclass

import numpy as np

from .attitude import (
    SINGULAR_COS,
    cross,
    euler_rate_map,
    euler_rate_map_dot,
    euler_rate_map_inv,
    rotation_from_euler,
)
from .errors import SingularMap


@dataclass
class FlatPoint:
    y: np.ndarray
    y_dot: np.ndarray
    y_ddot: np.ndarray

    @classmethod
    def hover(cls, p, delta=(0.0, 0.0, 0.0)):
        y = np.concatenate([np.asarray(p, dtype=float), np.asarray(delta, dtype=float)])
        return cls(y, np.zeros(6), np.zeros(6))


def _check_pitch(delta):
    if np.any(np.abs(np.cos(delta[..., 1])) < SINGULAR_COS):
        raise SingularMap("flat output at pitch = +-pi/2")


def _matvec(A, x):
    return np.einsum("...ij,...j->...i", A, x)


def state_matrices(x, params):
    """``A(x)``, ``B``, ``C`` and the gravity vector ``g``.

    Raises SingularMap when W(delta) cannot be inverted.
    """
    x = np.asarray(x, dtype=float)
    A = np.zeros((12, 12))
    A[0:3, 3:6] = np.eye(3)
    A[6:9, 9:12] = euler_rate_map_inv(x[6:9])
    B = np.zeros((12, 6))
    B[3:6, 0:3] = np.eye(3) / params.mass
    B[9:12, 3:6] = np.linalg.inv(params.inertia)
    C = np.zeros((6, 12))
    C[0:3, 0:3] = np.eye(3)
    C[3:6, 6:9] = np.eye(3)
    g = np.zeros(12)
    g[5] = params.gravity
    return A, B, C, g


def flat_to_state(fp):
    """``x = (p, p_dot, delta, W(delta) delta_dot)``."""
    y, yd = np.asarray(fp.y, dtype=float), np.asarray(fp.y_dot, dtype=float)
    delta = y[..., 3:6]
    _check_pitch(delta)
    omega = _matvec(euler_rate_map(delta), yd[..., 3:6])
    return np.concatenate([y[..., 0:3], yd[..., 0:3], delta, omega], axis=-1)


def flat_to_input(fp, alloc, params):
    """Rotor input reproducing the flat trajectory (unsaturated)."""
    y = np.asarray(fp.y, dtype=float)
    yd = np.asarray(fp.y_dot, dtype=float)
    ydd = np.asarray(fp.y_ddot, dtype=float)
    delta, delta_dot, delta_ddot = y[..., 3:6], yd[..., 3:6], ydd[..., 3:6]
    _check_pitch(delta)
    W = euler_rate_map(delta)
    omega = _matvec(W, delta_dot)
    omega_dot = _matvec(euler_rate_map_dot(delta, delta_dot), delta_dot) + _matvec(W, delta_ddot)
    J = params.inertia
    acc = ydd[..., 0:3].copy()
    acc[..., 2] += params.gravity
    R = rotation_from_euler(delta)
    force = params.mass * np.einsum("...ji,...j->...i", R, acc)
    Jw = _matvec(J, omega)
    moment = _matvec(J, omega_dot) + cross(omega, Jw)
    return _matvec(alloc.stacked_inv, np.concatenate([force, moment], axis=-1))


def flat_input_of(x, u, alloc, params):
    x = np.asarray(x, dtype=float)
    R = rotation_from_euler(x[..., 6:9])
    omega = x[..., 9:12]
    force = _matvec(R, _matvec(alloc.F, u))
    moment = _matvec(alloc.M, u) - cross(omega, _matvec(params.inertia, omega))
    return np.concatenate([force, moment], axis=-1)


def actuator_input_of(mu, x, alloc, params):
    """Inverse of :func:`flat_input_of` for a given state."""
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    R = rotation_from_euler(x[..., 6:9])
    omega = x[..., 9:12]
    force_body = np.einsum("...ji,...j->...i", R, mu[..., 0:3])
    moment = mu[..., 3:6] + cross(omega, _matvec(params.inertia, omega))
    return _matvec(alloc.stacked_inv, np.concatenate([force_body, moment], axis=-1))
