"""Star-shaped tilted hexarotor geometry and control allocation."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .errors import ConfigError, DegenerateKernel, RankDeficient

GRAVITY = 9.81


def _default_inertia():
    return np.diag([0.12, 0.12, 0.20])


@dataclass(frozen=True)
class VehicleParams:
    """Physical parameters of the platform.

    ``c_f`` and ``c_tau`` map squared propeller rates in (rad/s)^2 to thrust
    and drag torque.  The defaults put hover near half of ``rate_max``.
    """

    mass: float = 3.5
    inertia: np.ndarray = field(default_factory=_default_inertia)
    alpha: float = np.deg2rad(25.0)
    beta: float = np.deg2rad(10.0)
    arm_length: float = 0.4
    c_f: float = 9.3e-5
    c_tau: float = 1.5e-6
    rate_max: float = 83.5
    gravity: float = GRAVITY

    def __post_init__(self):
        J = np.asarray(self.inertia, dtype=float)
        object.__setattr__(self, "inertia", J)
        if self.mass <= 0:
            raise ConfigError("mass must be positive")
        if J.shape != (3, 3) or not np.allclose(J, J.T):
            raise ConfigError("inertia must be a symmetric 3x3 matrix")
        if np.any(np.linalg.eigvalsh(J) <= 0):
            raise ConfigError("inertia must be positive definite")
        for name in ("arm_length", "c_f", "c_tau", "rate_max", "gravity"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def weight(self):
        return self.mass * self.gravity

    @property
    def u_max(self):
        """Upper bound of a squared rate entry, (rad/s)^2."""
        return (2.0 * np.pi * self.rate_max) ** 2

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("alpha_deg", "beta_deg"):
            if key in d:
                d[key[:-4]] = np.deg2rad(d.pop(key))
        if "inertia" in d:
            J = np.asarray(d["inertia"], dtype=float)
            d["inertia"] = np.diag(J) if J.ndim == 1 else J
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class AllocationMatrices:
    F: np.ndarray
    M: np.ndarray
    F_bar: np.ndarray
    M_pinv_H: np.ndarray
    stacked_rank: int
    # kernel basis of M, used for zero-moment inputs
    N_M: np.ndarray
    stacked_inv: np.ndarray
    # F restricted to ker(M), and its determinant after scaling F to unit 2-norm
    FN: np.ndarray = None
    FN_det: float = 0.0

    @property
    def stacked(self):
        return np.vstack([self.F, self.M])


def _rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def arm_azimuths():
    return np.arange(6) * np.pi / 3


def rotor_axes(alpha, beta):
    """Spin axes z_Pi of the six rotors in the body frame, shape (6, 3).

    The tilt ``Rx((-1)^i alpha) Ry(beta)`` is applied in each arm frame, which
    is then rotated to the body frame by the arm azimuth.
    """
    e3 = np.array([0.0, 0.0, 1.0])
    axes = []
    for i, gamma in zip(range(1, 7), arm_azimuths()):
        axes.append(_rz(gamma) @ _rx((-1) ** i * alpha) @ _ry(beta) @ e3)
    return np.array(axes)


def rotor_positions(arm_length):
    return np.array([_rz(g) @ np.array([arm_length, 0.0, 0.0]) for g in arm_azimuths()])


def force_moment_matrices(params):
    """Raw (F, M) without any rank checks."""
    z = rotor_axes(params.alpha, params.beta)
    p = rotor_positions(params.arm_length)
    spin = np.array([(-1) ** i for i in range(1, 7)], dtype=float)
    F = params.c_f * z.T
    M = (params.c_f * np.cross(p, z) + params.c_tau * spin[:, None] * z).T
    return F, M


def build_allocation(params):
    F, M = force_moment_matrices(params)
    stacked = np.vstack([F, M])
    rank = int(np.linalg.matrix_rank(stacked))
    rank_f = int(np.linalg.matrix_rank(F))
    if rank_f < 3:
        raise RankDeficient(f"rank(F) = {rank_f}, the platform is not fully actuated")
    F_bar = null_space(F)
    MF = M @ F_bar
    if np.linalg.matrix_rank(MF) < 3:
        raise RankDeficient("rk(M F_bar) < 3")
    if rank < 6:
        raise RankDeficient(f"rank([F; M]) = {rank}")
    M_pinv_H = F_bar @ np.linalg.inv(MF)
    N_M = null_space(M)
    FN = F @ N_M
    return AllocationMatrices(
        F=F,
        M=M,
        F_bar=F_bar,
        M_pinv_H=M_pinv_H,
        stacked_rank=rank,
        N_M=N_M,
        stacked_inv=np.linalg.inv(stacked),
        FN=FN,
        # scale-free test: F carries the thrust coefficient (~1e-4)
        FN_det=float(np.linalg.det(FN / np.linalg.norm(F, 2))) if FN.shape == (3, 3) else 0.0,
    )


def zero_moment_input(alloc, d_star):
    """Input in ker(M) whose force is exactly ``d_star``."""
    if abs(alloc.FN_det) < 1e-12:
        raise DegenerateKernel("F restricted to ker(M) is singular")
    return alloc.N_M @ np.linalg.solve(alloc.FN, d_star)


def hover_input(params, alloc):
    """Input holding the level vehicle at rest."""
    return alloc.stacked_inv @ np.array([0.0, 0.0, params.weight, 0.0, 0.0, 0.0])
