"""Flatness-based controller: flatness feedforward plus LQR feedback on the flat input."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_continuous_are, solve_continuous_lyapunov

from .attitude import wrap_angle
from .errors import ConfigError, NotStabilizable
from .flatness import actuator_input_of, flat_input_of, flat_to_input, flat_to_state, state_matrices

ANGLE_SLICE = slice(6, 9)


def care_residual(A, B, Q, R, P):
    return A.T @ P + P @ A - P @ B @ np.linalg.solve(R, B.T @ P) + Q


def lqr_gain(A, B, Q, R, refine=3):
    """Infinite-horizon LQR gain ``K = R^-1 B^T P``.

    P is the stabilizing CARE solution, polished with a few Newton-Kleinman
    iterations.  Raises NotStabilizable when no stabilizing P is found.
    """
    A, B = np.atleast_2d(A).astype(float), np.atleast_2d(B).astype(float)
    Q, R = np.atleast_2d(Q).astype(float), np.atleast_2d(R).astype(float)
    try:
        P = solve_continuous_are(A, B, Q, R)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NotStabilizable(str(exc)) from None
    for _ in range(refine):
        K = np.linalg.solve(R, B.T @ P)
        Acl = A - B @ K
        if np.max(np.linalg.eigvals(Acl).real) >= 0:
            break
        P_new = solve_continuous_lyapunov(Acl.T, -(Q + K.T @ R @ K))
        P_new = 0.5 * (P_new + P_new.T)
        if np.linalg.norm(care_residual(A, B, Q, R, P_new)) >= np.linalg.norm(care_residual(A, B, Q, R, P)):
            break
        P = P_new
    K = np.linalg.solve(R, B.T @ P)
    if not np.all(np.isfinite(K)) or np.max(np.linalg.eigvals(A - B @ K).real) >= 0:
        raise NotStabilizable("closed loop A - B K is not Hurwitz")
    return K


def _default_q():
    return np.array([400.0] * 3 + [40.0] * 3 + [100.0] * 3 + [1.0] * 3)


def _default_r():
    return np.array([1.0] * 3 + [10.0] * 3)


@dataclass
class FcConfig:
    """LQR weights (diagonals) for state ``(p, v, delta, omega)`` and ``mu``.

    ``gain`` overrides the synthesized K_f when given.
    """

    q_diag: np.ndarray = field(default_factory=_default_q)
    r_diag: np.ndarray = field(default_factory=_default_r)
    gain: np.ndarray = None

    def __post_init__(self):
        self.q_diag = np.asarray(self.q_diag, dtype=float)
        self.r_diag = np.asarray(self.r_diag, dtype=float)
        if self.q_diag.shape != (12,) or np.any(self.q_diag < 0):
            raise ConfigError("q_diag must hold 12 non-negative weights")
        if self.r_diag.shape != (6,) or np.any(self.r_diag <= 0):
            raise ConfigError("r_diag must hold 6 positive weights")
        if self.gain is not None:
            self.gain = np.asarray(self.gain, dtype=float)
            if self.gain.shape != (6, 12):
                raise ConfigError("gain must be 6x12")

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def hover_linearization(params):
    """Constant (A, B) of the flat model at level attitude, where W^-1 = I."""
    A, B, _, _ = state_matrices(np.zeros(12), params)
    return A, B


class FlatnessController:
    def __init__(self, params, alloc, cfg=None):
        self.params = params
        self.alloc = alloc
        self.cfg = cfg or FcConfig()
        if self.cfg.gain is not None:
            self.K = self.cfg.gain
        else:
            A, B = hover_linearization(params)
            self.K = lqr_gain(A, B, np.diag(self.cfg.q_diag), np.diag(self.cfg.r_diag))

    def feedforward(self, ref):
        """Reference state and flat input from a FlatPoint."""
        x_r = flat_to_state(ref)
        mu_r = flat_input_of(x_r, flat_to_input(ref, self.alloc, self.params), self.alloc, self.params)
        return x_r, mu_r

    def compute(self, ref, x_hat):
        """Unsaturated rotor input for reference ``ref`` and measured 12-state."""
        return self.compute_from(*self.feedforward(ref), x_hat)

    def compute_from(self, x_r, mu_r, x_hat):
        """Feedback around a precomputed feedforward (see :meth:`feedforward`, which batches)."""
        err = np.asarray(x_hat, dtype=float) - x_r
        err[ANGLE_SLICE] = wrap_angle(err[ANGLE_SLICE])
        mu = mu_r - self.K @ err
        return actuator_input_of(mu, x_hat, self.alloc, self.params)
