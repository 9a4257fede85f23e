"""Reference trajectories: take-off, circle, attitude steps (A/B) and yaw ramps (C)."""

from dataclasses import dataclass

import numpy as np

from .attitude import quat_from_euler
from .errors import ConfigError, OutOfRange
from .flatness import FlatPoint

ROLL_STEPS = (-7.0, 0.0, 7.0)
PITCH_STEPS = (0.0, 3.5, 7.0)
YAW_STEPS = (90.0, 135.0, 180.0, 225.0, 270.0)
RAMP_SLOPES = (3.0, 6.0, 12.0)


@dataclass
class ReferencePoint:
    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    j: np.ndarray
    delta: np.ndarray
    delta_dot: np.ndarray
    delta_ddot: np.ndarray
    q: np.ndarray

    def flat_point(self):
        return FlatPoint(
            np.concatenate([self.p, self.delta]),
            np.concatenate([self.v, self.delta_dot]),
            np.concatenate([self.a, self.delta_ddot]),
        )

    def hc_refs(self):
        return self.p, self.v, self.a, self.j, self.q


def even_schedule(values, start, end):
    """``(time, value)`` pairs splitting ``[start, end]`` into equal segments.

    The first value also holds before ``start``.
    """
    n = len(values)
    return [(0.0 if i == 0 else start + i * (end - start) / n, float(v)) for i, v in enumerate(values)]


@dataclass
class ScenarioConfig:
    scenario: str = "A"
    radius: float = 2.0
    altitude: float = 1.0
    period: float = 30.0
    takeoff: float = 5.0
    duration: float = 60.0
    roll_schedule: list = None
    pitch_schedule: list = None
    yaw_schedule: list = None
    # scenario C
    ramp_slopes: tuple = RAMP_SLOPES
    ramp_roll: float = 0.0
    ramp_pitch: float = 0.0
    ramp_yaw_start: float = 90.0

    def __post_init__(self):
        self.scenario = self.scenario.upper()
        if self.scenario not in ("A", "B", "C"):
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.radius <= 0 or self.period <= 0 or self.takeoff <= 0:
            raise ConfigError("radius, period and takeoff must be positive")
        if self.duration <= self.takeoff:
            raise ConfigError("duration must exceed the take-off time")
        window = (self.takeoff, self.duration)
        if self.roll_schedule is None:
            self.roll_schedule = even_schedule(ROLL_STEPS, *window)
        if self.pitch_schedule is None:
            self.pitch_schedule = even_schedule(PITCH_STEPS, *window)
        if self.yaw_schedule is None:
            self.yaw_schedule = even_schedule(YAW_STEPS, *window)
        for sched in (self.roll_schedule, self.pitch_schedule, self.yaw_schedule):
            times = [t for t, _ in sched]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ConfigError("step times must increase")
        self.ramp_slopes = tuple(float(s) for s in self.ramp_slopes)

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def omega(self):
        return 2.0 * np.pi / self.period

    def ramp_windows(self):
        """``(start, end, slope_deg_s)`` for each yaw ramp of scenario C."""
        n = len(self.ramp_slopes)
        span = (self.duration - self.takeoff) / n
        return [(self.takeoff + i * span, self.takeoff + (i + 1) * span, s) for i, s in enumerate(self.ramp_slopes)]


def _quintic(tau):
    """Smoothstep 10t^3 - 15t^4 + 6t^5 and its first three derivatives in tau."""
    s = tau**3 * (10 - 15 * tau + 6 * tau**2)
    ds = 30 * tau**2 * (1 - tau) ** 2
    dds = 60 * tau * (1 - tau) * (1 - 2 * tau)
    ddds = 60 * (1 - 6 * tau + 6 * tau**2)
    return s, ds, dds, ddds


def _position(t, cfg):
    R, h, T = cfg.radius, cfg.altitude, cfg.takeoff
    if t < T:
        s, ds, dds, ddds = _quintic(t / T)
        e3 = np.array([0.0, 0.0, h])
        return np.array([R, 0.0, 0.0]) + s * e3, ds / T * e3, dds / T**2 * e3, ddds / T**3 * e3
    w = cfg.omega
    c, sn = np.cos(w * (t - T)), np.sin(w * (t - T))
    p = np.array([R * c, R * sn, h])
    v = R * w * np.array([-sn, c, 0.0])
    a = -R * w**2 * np.array([c, sn, 0.0])
    j = R * w**3 * np.array([sn, -c, 0.0])
    return p, v, a, j


def _step_value(t, schedule):
    value = schedule[0][1]
    for t_k, v_k in schedule:
        if t >= t_k:
            value = v_k
    return value


def _ramp_yaw(t, cfg):
    yaw, rate = cfg.ramp_yaw_start, 0.0
    for start, end, slope in cfg.ramp_windows():
        if t >= end:
            yaw += slope * (end - start)
        elif t >= start:
            yaw += slope * (t - start)
            rate = slope
            break
    return yaw, rate


def reference_at(t, cfg):
    if t < -1e-12 or t > cfg.duration + 1e-9:
        raise OutOfRange(f"t = {t} outside [0, {cfg.duration}]")
    p, v, a, j = _position(t, cfg)
    if cfg.scenario == "C":
        yaw, rate = _ramp_yaw(t, cfg)
        delta = np.deg2rad([cfg.ramp_roll, cfg.ramp_pitch, yaw])
        delta_dot = np.deg2rad([0.0, 0.0, rate])
    else:
        delta = np.deg2rad(
            [
                _step_value(t, cfg.roll_schedule),
                _step_value(t, cfg.pitch_schedule),
                _step_value(t, cfg.yaw_schedule),
            ]
        )
        delta_dot = np.zeros(3)
    return ReferencePoint(p, v, a, j, delta, delta_dot, np.zeros(3), quat_from_euler(delta))
