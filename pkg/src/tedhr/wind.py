"""Wind field (log shear + Dryden turbulence + discrete gust) and drag force."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import signal
from scipy.linalg import expm, solve_continuous_lyapunov, solve_discrete_lyapunov

from .attitude import rotation_of
from .errors import ConfigError, OutOfLayer

FT = 0.3048

RHO0 = 1.225
T0 = 288.15
LAPSE = 0.0065
R_AIR = 287.053
G0 = 9.80665
TROPOPAUSE = 11000.0


@dataclass
class WindConfig:
    reference_speed: float = 10.0
    reference_altitude: float = 6.0
    roughness: float = 0.15
    gust_start: float = 25.0
    gust_rise: float = 2.0
    gust_target: np.ndarray = field(default_factory=lambda: np.array([2.0, 2.0, 1.0]))
    area_lateral: float = 0.111
    area_upper: float = 0.885
    shear: bool = True
    dryden: bool = True
    gust: bool = True
    # turbulence axes; the default keeps it along x_W like the shear
    dryden_axes: str = "x"
    # None -> reference_speed (floored at 1 m/s)
    dryden_airspeed: float = None
    drag_law: str = "linear"

    def __post_init__(self):
        self.gust_target = np.asarray(self.gust_target, dtype=float)
        if self.reference_altitude <= 0:
            raise ConfigError("reference_altitude must be positive")
        if self.gust_rise <= 0:
            raise ConfigError("gust_rise must be positive")
        if self.area_lateral <= 0 or self.area_upper <= 0:
            raise ConfigError("areas must be positive")
        if self.drag_law not in ("linear", "quadratic"):
            raise ConfigError(f"unknown drag_law {self.drag_law!r}")
        if set(self.dryden_axes) - set("xyz"):
            raise ConfigError("dryden_axes must be a subset of 'xyz'")

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def shear_velocity(h, cfg):
    """Logarithmic wind profile along x_W; zero at or below the roughness length."""
    z0 = cfg.roughness
    mag = cfg.reference_speed * np.log(max(h, z0) / z0) / np.log(cfg.reference_altitude / z0)
    return np.array([mag, 0.0, 0.0])


def gust_velocity(t, cfg):
    """Half-cosine ramp from zero at ``gust_start`` to ``gust_target``."""
    tau = t - cfg.gust_start
    if tau < 0:
        return np.zeros(3)
    if tau >= cfg.gust_rise:
        return cfg.gust_target.copy()
    return 0.5 * (1.0 - np.cos(np.pi * tau / cfg.gust_rise)) * cfg.gust_target


def air_density(h):
    if h > TROPOPAUSE:
        raise OutOfLayer(f"altitude {h} m is above the troposphere")
    return RHO0 * (1.0 - LAPSE * h / T0) ** (G0 / (R_AIR * LAPSE) - 1.0)


def wind_force(wind_vel, state, cfg):
    """Disturbance force (world frame) from the air velocity relative to the body."""
    d_w = np.asarray(wind_vel, dtype=float) - state.v
    speed = np.linalg.norm(d_w)
    if speed < 1e-9:
        return np.zeros(3)
    z_b = rotation_of(state.q)[:, 2]
    d_v = abs(d_w @ z_b) / speed
    area = (1.0 - d_v) * cfg.area_lateral + d_v * cfg.area_upper
    rho = air_density(max(state.p[2], 0.0))
    if cfg.drag_law == "quadratic":
        return 0.5 * rho * area * speed * d_w
    return rho * area * d_w


def dryden_parameters(h, w20):
    """MIL-F-8785C low-altitude intensities and scale lengths, SI units.

    Returns ``(sigma_u, sigma_v, sigma_w), (L_u, L_v, L_w)``.
    """
    h_ft = max(h / FT, 10.0)
    k = 0.177 + 0.000823 * h_ft
    sigma_w = 0.1 * w20
    sigma_u = sigma_w / k**0.4
    L_w = h_ft * FT
    L_u = h_ft / k**1.2 * FT
    return (sigma_u, sigma_u, sigma_w), (L_u, L_u, L_w)


class ShapingFilter:
    """Exact zero-order discretization of one Dryden shaping filter.

    The continuous filter is scaled so that its stationary output variance is
    exactly ``sigma**2``; the discrete recursion ``x <- Ad x + Ld n`` with unit
    normal ``n`` reproduces the continuous covariance at the sample instants.
    """

    def __init__(self, order, sigma, L, V, dt):
        T = L / V
        if order == 1:
            num, den = [1.0], [T, 1.0]
        else:
            num, den = [np.sqrt(3.0) * T, 1.0], [T * T, 2 * T, 1.0]
        A, B, C, _ = signal.tf2ss(num, den)
        P = solve_continuous_lyapunov(A, -B @ B.T)
        var = float((C @ P @ C.T).item())
        B = B * (sigma / np.sqrt(var)) if sigma > 0 else B * 0.0
        n = A.shape[0]
        # Van Loan: discrete process-noise covariance
        blk = np.zeros((2 * n, 2 * n))
        blk[:n, :n] = -A
        blk[:n, n:] = B @ B.T
        blk[n:, n:] = A.T
        E = expm(blk * dt)
        self.Ad = E[n:, n:].T
        Qd = self.Ad @ E[:n, n:]
        Qd = 0.5 * (Qd + Qd.T)
        self.Ld = np.linalg.cholesky(Qd + 1e-300 * np.eye(n)) if sigma > 0 else np.zeros((n, n))
        self.C = C.ravel()
        self.order = n
        self.P_stat = solve_discrete_lyapunov(self.Ad, self.Ld @ self.Ld.T) if sigma > 0 else np.zeros((n, n))

    def step(self, x, noise):
        x = self.Ad @ x + self.Ld @ noise
        return x, float(self.C @ x)

    def path(self, noise):
        """Output sequence for a block of unit-normal noise, starting from rest.

        Same recursion as repeated :meth:`step` calls, run through lfilter.
        """
        n_steps = noise.shape[0]
        y = np.zeros(n_steps)
        for j in range(self.order):
            num, den = signal.ss2tf(self.Ad, self.Ld[:, j : j + 1], self.C[None, :], np.zeros((1, 1)))
            # step() reads x after the update, so drop the one-sample delay
            # that ss2tf builds in (num[0] == 0)
            y += signal.lfilter(num.ravel()[1:], den, noise[:, j])
        return y


@lru_cache(maxsize=64)
def _filters(h_key, w20, V, dt, axes):
    sigmas, lengths = dryden_parameters(h_key, w20)
    out = []
    for i, axis in enumerate("xyz"):
        sigma = sigmas[i] if axis in axes else 0.0
        out.append(ShapingFilter(1 if i == 0 else 2, sigma, lengths[i], V, dt))
    return tuple(out)


@dataclass
class WindState:
    filter_states: list
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    turbulence: np.ndarray = field(default_factory=lambda: np.zeros(3))


class WindField:
    """Per-run wind generator; call :meth:`update` once per control tick."""

    def __init__(self, cfg, rng, dt, h0=0.0):
        self.cfg = cfg
        self.rng = rng
        self.dt = dt
        filters = self._filters(h0)
        # stationary start so the turbulence is statistically steady from t = 0
        states = []
        for f in filters:
            z = rng.standard_normal(f.order)
            P = f.P_stat
            L = np.linalg.cholesky(P + 1e-300 * np.eye(f.order)) if np.any(P) else np.zeros_like(P)
            states.append(L @ z)
        self.state = WindState(states)

    def _filters(self, h):
        cfg = self.cfg
        V = cfg.dryden_airspeed or max(cfg.reference_speed, 1.0)
        # altitudes below 10 ft share one parameter set; above, round to 0.1 m
        h_key = max(round(h, 1), 0.0) if h > 10 * FT else 0.0
        return _filters(h_key, float(cfg.reference_speed), float(V), float(self.dt), cfg.dryden_axes)

    def dryden_update(self, h):
        turb = np.zeros(3)
        for i, f in enumerate(self._filters(h)):
            noise = self.rng.standard_normal(f.order)
            self.state.filter_states[i], turb[i] = f.step(self.state.filter_states[i], noise)
        self.state.turbulence = turb
        return turb

    def update(self, t, h):
        cfg = self.cfg
        vel = np.zeros(3)
        if cfg.shear:
            vel += shear_velocity(max(h, 0.0), cfg)
        if cfg.dryden:
            vel += self.dryden_update(max(h, 0.0))
        if cfg.gust:
            vel += gust_velocity(t, cfg)
        self.state.velocity = vel
        return vel
