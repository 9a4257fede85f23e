"""Quaternion, ZYX Euler and rotation-matrix algebra.

Quaternions are numpy arrays ``[eta, ex, ey, ez]`` (scalar first, Hamilton
convention) mapping body-frame vectors to the world frame.  Euler angles are
``[phi, theta, psi]`` with ``R = Rz(psi) @ Ry(theta) @ Rx(phi)``.

Most functions accept a leading batch dimension.
"""

import numpy as np

from .errors import GimbalLock, SingularMap

GIMBAL_MARGIN = 1e-6
SINGULAR_COS = 1e-6

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


# np.stack is slow for the scalar case that dominates closed-loop runs
def _vec(parts):
    a = np.array(parts, dtype=float)
    return a if a.ndim == 1 else np.moveaxis(a, 0, -1)


def _mat3(rows):
    a = np.array(rows, dtype=float)
    return a if a.ndim == 2 else np.moveaxis(a, (0, 1), (-2, -1))


def skew(v):
    """Skew-symmetric matrix with ``skew(a) @ b == cross(a, b)``."""
    v = np.asarray(v, dtype=float)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    o = np.zeros_like(x)
    return _mat3([[o, -z, y], [z, o, -x], [-y, x, o]])


def cross(a, b):
    # np.cross carries a lot of overhead for 3-vectors
    return _vec(
        [
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ]
    )


def wrap_angle(a):
    """Wrap angles to [-pi, pi)."""
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


def quat_normalize(q):
    """Unit-normalize and pick the representative with ``eta >= 0``."""
    q = np.asarray(q, dtype=float)
    q = q / np.sqrt(np.sum(q * q, axis=-1, keepdims=True))
    return np.where(q[..., :1] < 0.0, -q, q)


def quat_multiply(a, b):
    """Raw Hamilton product ``a * b`` (no normalization)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return _vec(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_compose(q1, q2):
    """Composition ``q1 o q2``; ``rotation_of(result) = R(q1) @ R(q2)``."""
    return quat_normalize(quat_multiply(q1, q2))


def quat_inverse(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def rotation_of(q):
    """Rotation matrix of a unit quaternion."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return _mat3(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_from_euler(delta):
    """``Rz(psi) Ry(theta) Rx(phi)`` built directly from the angles."""
    delta = np.asarray(delta, dtype=float)
    sf, cf = np.sin(delta[..., 0]), np.cos(delta[..., 0])
    st, ct = np.sin(delta[..., 1]), np.cos(delta[..., 1])
    sp, cp = np.sin(delta[..., 2]), np.cos(delta[..., 2])
    return _mat3(
        [
            [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
            [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
            [-st, ct * sf, ct * cf],
        ]
    )


def quat_from_euler(delta):
    delta = np.asarray(delta, dtype=float)
    hf, ht, hp = delta[..., 0] / 2, delta[..., 1] / 2, delta[..., 2] / 2
    cf, sf = np.cos(hf), np.sin(hf)
    ct, st = np.cos(ht), np.sin(ht)
    cp, sp = np.cos(hp), np.sin(hp)
    q = _vec(
        [
            cp * ct * cf + sp * st * sf,
            cp * ct * sf - sp * st * cf,
            cp * st * cf + sp * ct * sf,
            sp * ct * cf - cp * st * sf,
        ]
    )
    return quat_normalize(q)


def euler_from_quat(q):
    """ZYX Euler angles of a single quaternion.

    Raises GimbalLock when pitch is within 1e-6 rad of +-pi/2.
    """
    w, x, y, z = np.asarray(q, dtype=float)
    r11 = 1 - 2 * (y * y + z * z)
    r21 = 2 * (x * y + w * z)
    r31 = 2 * (x * z - w * y)
    r32 = 2 * (y * z + w * x)
    r33 = 1 - 2 * (x * x + y * y)
    theta = np.arctan2(-r31, np.hypot(r11, r21))
    if np.pi / 2 - abs(theta) < GIMBAL_MARGIN:
        raise GimbalLock(f"pitch {theta:.9f} rad is at the gimbal singularity")
    phi = np.arctan2(r32, r33)
    psi = np.arctan2(r21, r11)
    return wrap_angle(np.array([phi, theta, psi]))


def quat_kinematics(q, omega):
    """Quaternion derivative ``q_dot = 1/2 q o (0, omega)`` for a body-frame rate.

    In matrix form ``1/2 [-eps^T; eta I + [eps]x] omega``.
    """
    q = np.asarray(q, dtype=float)
    omega = np.asarray(omega, dtype=float)
    eta, eps = q[..., 0], q[..., 1:]
    eta_dot = -0.5 * np.sum(eps * omega, axis=-1)
    eps_dot = 0.5 * (eta[..., None] * omega + cross(eps, omega))
    return np.concatenate([eta_dot[..., None], eps_dot], axis=-1)


def quat_exp(rotvec):
    """Unit quaternion of a rotation vector (axis * angle)."""
    rotvec = np.asarray(rotvec, dtype=float)
    angle = np.linalg.norm(rotvec, axis=-1, keepdims=True)
    half = 0.5 * angle
    # sin(x)/x with its series near zero
    scale = np.where(angle > 1e-8, np.sin(half) / np.where(angle > 1e-8, angle, 1.0), 0.5 - angle**2 / 48.0)
    return np.concatenate([np.cos(half), scale * rotvec], axis=-1)


def quat_integrate(q, omega, dt):
    """Advance ``q`` under constant body rate ``omega`` for ``dt`` seconds."""
    return quat_compose(q, quat_exp(np.asarray(omega, dtype=float) * dt))


def euler_rate_map(delta):
    """W(delta) with ``omega = W(delta) @ delta_dot``."""
    delta = np.asarray(delta, dtype=float)
    sf, cf = np.sin(delta[..., 0]), np.cos(delta[..., 0])
    st, ct = np.sin(delta[..., 1]), np.cos(delta[..., 1])
    one, zero = np.ones_like(sf), np.zeros_like(sf)
    return _mat3(
        [
            [one, zero, -st],
            [zero, cf, ct * sf],
            [zero, -sf, ct * cf],
        ]
    )


def euler_rate_map_dot(delta, delta_dot):
    """Time derivative of W along a trajectory with rates ``delta_dot``."""
    delta = np.asarray(delta, dtype=float)
    delta_dot = np.asarray(delta_dot, dtype=float)
    sf, cf = np.sin(delta[..., 0]), np.cos(delta[..., 0])
    st, ct = np.sin(delta[..., 1]), np.cos(delta[..., 1])
    df, dt = delta_dot[..., 0], delta_dot[..., 1]
    zero = np.zeros_like(sf)
    return _mat3(
        [
            [zero, zero, -ct * dt],
            [zero, -sf * df, -st * sf * dt + ct * cf * df],
            [zero, -cf * df, -st * cf * dt - ct * sf * df],
        ]
    )


def euler_rate_map_inv(delta):
    """Closed-form inverse of W; raises SingularMap when cos(theta) ~ 0."""
    delta = np.asarray(delta, dtype=float)
    sf, cf = np.sin(delta[..., 0]), np.cos(delta[..., 0])
    st, ct = np.sin(delta[..., 1]), np.cos(delta[..., 1])
    if np.any(np.abs(ct) < SINGULAR_COS):
        raise SingularMap("W(delta) is singular at theta = +-pi/2")
    tt = st / ct
    one, zero = np.ones_like(sf), np.zeros_like(sf)
    return _mat3(
        [
            [one, sf * tt, cf * tt],
            [zero, cf, -sf],
            [zero, sf / ct, cf / ct],
        ]
    )


def geodesic_distance(q, q_r):
    """Angle in [0, pi] between two orientations (sign-insensitive)."""
    d = np.abs(np.sum(np.asarray(q, dtype=float) * np.asarray(q_r, dtype=float), axis=-1))
    return 2.0 * np.arccos(np.clip(d, 0.0, 1.0))
