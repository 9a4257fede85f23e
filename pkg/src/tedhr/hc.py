"""Hierarchical nonlinear controller.

The outer loop shapes the control-force intensity ``f_c`` and a desired
orientation ``q_d`` so that the force mismatch
``f_delta = R(q_d) d_star f_c - f_r`` contracts; attitude regulation toward
the reference runs at lower priority through ``q_d``.  The inner loop tracks
``q_d`` with a quaternion PD law and the input is
``u = M_pinv_H tau_r + u_bar f_c``.
"""

from dataclasses import dataclass, field

import numpy as np

from .attitude import IDENTITY, cross, quat_compose, quat_integrate, quat_inverse, rotation_of, skew
from .errors import ConfigError, DegenerateDirection, ThrustUnderflow
from .vehicle import zero_moment_input

F_MIN = 0.5
E3 = np.array([0.0, 0.0, 1.0])


@dataclass
class HcGains:
    k_pp: float = 25.0
    k_pd: float = 14.0
    k_q: float = 8.0
    k_delta: float = 12.0
    k_R: float = 120.0
    k_omega: float = 25.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if value <= 0:
                raise ConfigError(f"gain {name} must be positive")

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class HcState:
    f_c: float
    q_d: np.ndarray = field(default_factory=lambda: IDENTITY.copy())


def preferential_direction(q_r, p_ddot_r, params):
    """Body-frame direction of the force that balances gravity plus the reference acceleration."""
    d = rotation_of(q_r).T @ (params.mass * (params.gravity * E3 + np.asarray(p_ddot_r, dtype=float)))
    n = np.sqrt(d @ d)
    if n < 1e-6:
        raise DegenerateDirection("reference acceleration cancels gravity")
    return d / n


def reference_force(e_p, e_v, p_ddot_r, gains, params):
    m = params.mass
    return m * params.gravity * E3 + m * np.asarray(p_ddot_r, dtype=float) - gains.k_pp * e_p - gains.k_pd * e_v


def force_mismatch(hc, d_star, f_r):
    return rotation_of(hc.q_d) @ d_star * hc.f_c - f_r


def virtual_input(e_p, e_v, f_delta, p_dddot_r, gains, params):
    """Virtual input that makes the force mismatch obey ``f_delta_dot = -k_delta f_delta``.

    The jerk feedforward enters with a plus sign: it cancels the ``m p_dddot_r``
    term of the reference-force derivative.
    """
    m = params.mass
    k_pp, k_pd = gains.k_pp, gains.k_pd
    return (
        (k_pd * k_pp / m) * e_p
        + (k_pd**2 / m - k_pp) * e_v
        - (k_pd / m + gains.k_delta) * f_delta
        + m * np.asarray(p_dddot_r, dtype=float)
    )


def desired_dynamics(hc, nu, d_star, q_r, gains):
    """Desired body rate of ``q_d`` and the rate of change of ``f_c``."""
    if hc.f_c < F_MIN:
        raise ThrustUnderflow(f"f_c = {hc.f_c:.4g} N is below {F_MIN} N")
    R_d = rotation_of(hc.q_d)
    eps = quat_compose(quat_inverse(q_r), hc.q_d)[1:]
    omega_d = skew(d_star) @ R_d.T @ nu / hc.f_c - gains.k_q * d_star * (d_star @ eps)
    f_c_dot = (R_d @ d_star) @ nu
    return omega_d, f_c_dot


def reference_moment(q, omega, hc, omega_d, params, gains):
    """Inner-loop moment regulating the attitude toward ``q_d``.

    Quaternion proportional term on ``q_delta = q_d^-1 o q`` (sign-corrected
    for the double cover), rate feedback toward ``omega_d`` mapped into the
    body frame, and gyroscopic feedforward.
    """
    J = params.inertia
    q_delta = quat_compose(quat_inverse(hc.q_d), q)
    sgn = 1.0 if q_delta[0] >= 0 else -1.0
    omega_d_body = rotation_of(q_delta).T @ omega_d
    return cross(omega, J @ omega) - J @ (gains.k_R * sgn * q_delta[1:] + gains.k_omega * (omega - omega_d_body))


@dataclass
class HcOutput:
    u: np.ndarray
    d_star: np.ndarray
    u_bar: np.ndarray
    tau_r: np.ndarray
    f_delta: np.ndarray
    omega_d: np.ndarray
    f_c_dot: float


def hc_outputs(refs, meas, hc, alloc, params, gains):
    """Evaluate one controller tick without advancing the internal state."""
    p_r, v_r, a_r, j_r, q_r = refs
    e_p = meas.p - p_r
    e_v = meas.v - v_r
    d_star = preferential_direction(q_r, a_r, params)
    u_bar = zero_moment_input(alloc, d_star)
    f_r = reference_force(e_p, e_v, a_r, gains, params)
    f_delta = force_mismatch(hc, d_star, f_r)
    nu = virtual_input(e_p, e_v, f_delta, j_r, gains, params)
    omega_d, f_c_dot = desired_dynamics(hc, nu, d_star, q_r, gains)
    tau_r = reference_moment(meas.q, meas.omega, hc, omega_d, params, gains)
    u = alloc.M_pinv_H @ tau_r + u_bar * hc.f_c
    return HcOutput(u, d_star, u_bar, tau_r, f_delta, omega_d, f_c_dot)


def hc_step(refs, meas, hc, dt_ctrl, alloc, params, gains):
    """One 100 Hz tick: returns the unsaturated input, the new HcState and diagnostics.

    ``refs`` is ``(p_r, v_r, a_r, j_r, q_r)``; ``meas`` needs ``p, v, q, omega``.
    ``f_c`` advances by explicit Euler, ``q_d`` by the exponential map.
    """
    out = hc_outputs(refs, meas, hc, alloc, params, gains)
    new = HcState(hc.f_c + out.f_c_dot * dt_ctrl, quat_integrate(hc.q_d, out.omega_d, dt_ctrl))
    return out.u, new, out


class HierarchicalController:
    def __init__(self, params, alloc, gains=None):
        self.params = params
        self.alloc = alloc
        self.gains = gains or HcGains()
        self.state = None

    def reset(self, q0):
        """Start from ``f_c = m g`` and ``q_d`` equal to the first measured attitude."""
        self.state = HcState(self.params.weight, np.asarray(q0, dtype=float).copy())

    def compute(self, refs, meas, dt_ctrl):
        if self.state is None:
            self.reset(meas.q)
        u, self.state, self.last = hc_step(refs, meas, self.state, dt_ctrl, self.alloc, self.params, self.gains)
        return u
