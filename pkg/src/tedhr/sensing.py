"""Delayed, noisy, sampled measurement of the full state."""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .attitude import euler_from_quat, quat_from_euler, quat_normalize, wrap_angle
from .errors import BufferUnderrun, ConfigError

# noise variances of the measured channels, per axis
TABLE_I = {
    "p": (4.099e-7, 2.838e-7, 2.105e-8),  # m^2
    "delta": (0.0012, 0.0011, 0.0011),  # deg^2
    "v": (2.050e-6, 1.419e-6, 1.050e-7),  # (m/s)^2
    "omega": (0.0024, 0.0022, 0.0022),  # (deg/s)^2
}


def _arr(values):
    return np.asarray(values, dtype=float)


@dataclass
class SensorConfig:
    delay: float = 0.012
    sample_rate: float = 100.0
    var_p: np.ndarray = field(default_factory=lambda: _arr(TABLE_I["p"]))
    var_delta_deg2: np.ndarray = field(default_factory=lambda: _arr(TABLE_I["delta"]))
    var_v: np.ndarray = field(default_factory=lambda: _arr(TABLE_I["v"]))
    var_omega_deg2: np.ndarray = field(default_factory=lambda: _arr(TABLE_I["omega"]))

    def __post_init__(self):
        for name in ("var_p", "var_delta_deg2", "var_v", "var_omega_deg2"):
            val = _arr(getattr(self, name))
            if val.shape != (3,) or np.any(val < 0):
                raise ConfigError(f"{name} must be three non-negative variances")
            setattr(self, name, val)
        if self.delay < 0:
            raise ConfigError("delay must be non-negative")
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate must be positive")

    @classmethod
    def ideal(cls, sample_rate=100.0):
        z = np.zeros(3)
        return cls(0.0, sample_rate, z, z, z, z)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        renames = {"p": "var_p", "delta": "var_delta_deg2", "v": "var_v", "omega": "var_omega_deg2"}
        for old, new in renames.items():
            if old in d:
                d[new] = d.pop(old)
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def noise_std(self):
        """Standard deviations in SI units (m, rad, m/s, rad/s), shape (12,)."""
        deg = np.pi / 180.0
        return np.sqrt(
            np.concatenate(
                [self.var_p, self.var_delta_deg2 * deg**2, self.var_v, self.var_omega_deg2 * deg**2]
            )
        )


@dataclass
class MeasuredState:
    t: float
    p: np.ndarray
    euler: np.ndarray
    v: np.ndarray
    omega: np.ndarray

    @property
    def q(self):
        return quat_from_euler(self.euler)

    def flat_state(self):
        """12-vector ``(p, v, delta, omega)``."""
        return np.concatenate([self.p, self.v, self.euler, self.omega])


def _interpolate(t0, x0, t1, x1, t):
    s = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
    x = x0 + s * (x1 - x0)
    q1 = x1[6:10] if np.dot(x0[6:10], x1[6:10]) >= 0 else -x1[6:10]
    x[6:10] = quat_normalize(x0[6:10] + s * (q1 - x0[6:10]))
    return x


class MeasurementBuffer:
    """Time-ordered history of true 13-vector states."""

    def __init__(self, delay):
        self.delay = delay
        self.times = deque()
        self.states = deque()

    def push(self, t, x):
        if self.times and t <= self.times[-1]:
            raise ValueError("buffer times must increase")
        self.times.append(t)
        self.states.append(np.array(x, dtype=float))
        # keep one entry at or before the oldest time a future query can ask for
        horizon = t - self.delay - 1e-12
        while len(self.times) > 2 and self.times[1] <= horizon:
            self.times.popleft()
            self.states.popleft()

    def extend(self, times, states):
        """Append a block of samples (same rules as :meth:`push`)."""
        times = [float(t) for t in times]
        if self.times and times[0] <= self.times[-1] or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("buffer times must increase")
        self.times.extend(times)
        self.states.extend(np.array(states, dtype=float))
        horizon = times[-1] - self.delay - 1e-12
        while len(self.times) > 2 and self.times[1] <= horizon:
            self.times.popleft()
            self.states.popleft()

    def lookup(self, t):
        times = self.times
        if not times or t < times[0] - 1e-12:
            raise BufferUnderrun(f"no history at t = {t:.6f}")
        if t >= times[-1]:
            return self.states[-1].copy()
        for i in range(len(times) - 1, 0, -1):
            if times[i - 1] <= t:
                return _interpolate(times[i - 1], self.states[i - 1], times[i], self.states[i], t)
        return self.states[0].copy()


class Sensor:
    """Measurement channel with transport delay, Gaussian noise and a 100 Hz hold.

    Until ``delay`` seconds have elapsed the channel reports the initial state
    without noise.
    """

    def __init__(self, cfg, rng, initial_state):
        self.cfg = cfg
        self.rng = rng
        self.buffer = MeasurementBuffer(cfg.delay)
        x0 = initial_state.to_array() if hasattr(initial_state, "to_array") else np.asarray(initial_state)
        self.buffer.push(0.0, x0)
        self._initial = self._to_measured(0.0, x0)
        self._std = cfg.noise_std()
        self._tick = -1
        self._last = None

    @staticmethod
    def _to_measured(t, x):
        return MeasuredState(t, x[0:3].copy(), euler_from_quat(x[6:10]), x[3:6].copy(), x[10:13].copy())

    def push(self, t, x):
        if t > 0.0:
            self.buffer.push(t, x)

    def push_block(self, times, states):
        """Record a block of true states, e.g. the sub-steps of one control period."""
        self.buffer.extend(times, states)

    def sample(self, t):
        tick = int(np.floor(t * self.cfg.sample_rate + 1e-9))
        if tick == self._tick:
            return self._last
        t_tick = tick / self.cfg.sample_rate
        if t_tick < self.cfg.delay - 1e-12:
            meas = MeasuredState(t_tick, self._initial.p, self._initial.euler, self._initial.v, self._initial.omega)
        else:
            x = self.buffer.lookup(t_tick - self.cfg.delay)
            meas = self._to_measured(t_tick, x)
            n = self.rng.standard_normal(12) * self._std
            meas.p = meas.p + n[0:3]
            meas.euler = wrap_angle(meas.euler + n[3:6])
            meas.v = meas.v + n[6:9]
            meas.omega = meas.omega + n[9:12]
        self._tick, self._last = tick, meas
        return meas
