"""Closed-loop runs, tracking metrics and Monte-Carlo aggregation."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .attitude import euler_from_quat, geodesic_distance, wrap_angle
from .config import ExperimentConfig
from .dynamics import ExternalWrench, RigidBodyState, propagate, saturate
from .errors import ConfigError, NonFinite, TedhrError
from .fc import FlatnessController
from .flatness import FlatPoint
from .hc import HierarchicalController
from .scenario import reference_at
from .sensing import Sensor, SensorConfig
from .vehicle import build_allocation
from .wind import WindField, wind_force

log = logging.getLogger(__name__)

CONTROLLERS = ("fc", "hc", "fc-ideal")


def rates_hz(u):
    return np.sqrt(np.maximum(u, 0.0)) / (2.0 * np.pi)


def metrics(p, p_r, q, q_r, u, excess_hz):
    """``(e_p [m], e_a [deg], u_n [Hz], u_e [Hz])`` for one tick."""
    e_p = float(np.linalg.norm(np.asarray(p) - p_r))
    e_a = float(np.rad2deg(geodesic_distance(q, q_r)))
    u_n = float(np.linalg.norm(rates_hz(u)))
    return e_p, e_a, u_n, float(excess_hz)


@dataclass
class RunRecord:
    scenario: str
    controller: str
    seed: int
    takeoff: float
    t: np.ndarray
    p: np.ndarray
    p_r: np.ndarray
    q: np.ndarray
    q_r: np.ndarray
    euler_deg: np.ndarray
    euler_r_deg: np.ndarray
    measured: np.ndarray
    u_cmd: np.ndarray
    u: np.ndarray
    wind: np.ndarray
    e_p: np.ndarray
    e_a_deg: np.ndarray
    u_n: np.ndarray
    u_e: np.ndarray
    status: str = "completed"
    divergence_time: float = None
    divergence_reason: str = None

    @property
    def diverged(self):
        return self.status == "diverged"

    @property
    def rates_hz(self):
        return rates_hz(self.u)

    @property
    def u_n_sq(self):
        """Norm of the squared rates in Hz^2, the magnitude convention of the published table."""
        return np.linalg.norm(self.rates_hz**2, axis=1)

    def steady_mask(self):
        return self.t >= self.takeoff - 1e-9

    def means(self):
        m = self.steady_mask()
        if not np.any(m):
            return {k: float("nan") for k in ("e_p", "e_a", "u_n", "u_n_sq", "u_e")}
        return {
            "e_p": float(self.e_p[m].mean()),
            "e_a": float(self.e_a_deg[m].mean()),
            "u_n": float(self.u_n[m].mean()),
            "u_n_sq": float(self.u_n_sq[m].mean()),
            "u_e": float(self.u_e[m].mean()),
        }


def make_controller(name, cfg, alloc):
    if name in ("fc", "fc-ideal"):
        return FlatnessController(cfg.vehicle, alloc, cfg.gains_fc)
    if name == "hc":
        return HierarchicalController(cfg.vehicle, alloc, cfg.gains_hc)
    raise ConfigError(f"unknown controller {name!r}; expected one of {CONTROLLERS}")


def simulate_run(scenario, controller, seed, config=None):
    """One closed-loop run; deterministic in ``(scenario, controller, seed, config)``.

    The truth model advances with ``dt_sim`` while the controller, the sensor
    and the wind update on the ``dt_ctrl`` grid (zero-order hold in between).
    ``fc-ideal`` runs without delay, measurement noise or wind.  The run stops
    at the first tick whose position error exceeds the divergence threshold,
    or when the state or the controller breaks down.
    """
    cfg = (config or ExperimentConfig()).with_scenario(scenario)
    if controller not in CONTROLLERS:
        raise ConfigError(f"unknown controller {controller!r}; expected one of {CONTROLLERS}")
    params, sc, sim = cfg.vehicle, cfg.scenario, cfg.sim
    alloc = build_allocation(params)
    ideal = controller == "fc-ideal"
    windy = sc.scenario == "B" and not ideal

    wind_rng, sensor_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    ref0 = reference_at(0.0, sc)
    state = RigidBodyState(p=ref0.p.copy())
    sensor_cfg = SensorConfig.ideal(cfg.sensor.sample_rate) if ideal else cfg.sensor
    sensor = Sensor(sensor_cfg, sensor_rng, state)
    wind = WindField(cfg.wind, wind_rng, sim.dt_ctrl, h0=state.p[2]) if windy else None
    ctrl = make_controller(controller, cfg, alloc)

    n_ticks = int(round(sc.duration / sim.dt_ctrl))
    n_sub = sim.substeps
    J_inv = np.linalg.inv(params.inertia)
    refs = [reference_at(k * sim.dt_ctrl, sc) for k in range(n_ticks + 1)]
    if controller != "hc":
        # the feedforward depends on the reference only: evaluate it in one batch
        flat = [r.flat_point() for r in refs]
        batch = FlatPoint(*(np.array([getattr(f, a) for f in flat]) for a in ("y", "y_dot", "y_ddot")))
        ff_x, ff_mu = ctrl.feedforward(batch)
    rows = {k: [] for k in ("t", "p", "p_r", "q", "q_r", "eul", "eul_r", "meas", "u_cmd", "u", "wind", "met")}
    status, t_div, reason = "completed", None, None
    wind_vel = np.zeros(3)

    for k in range(n_ticks + 1):
        t = k * sim.dt_ctrl
        meas = sensor.sample(t)
        ref = refs[k]
        try:
            if controller == "hc":
                u_cmd = ctrl.compute(ref.hc_refs(), meas, sim.dt_ctrl)
            else:
                u_cmd = ctrl.compute_from(ff_x[k], ff_mu[k], meas.flat_state())
        except TedhrError as exc:
            status, t_div, reason = "diverged", t, f"controller: {exc}"
            break
        u, report = saturate(u_cmd, params.rate_max)
        met = metrics(state.p, ref.p, state.q, ref.q, u, report.excess_hz)

        rows["t"].append(t)
        rows["p"].append(state.p)
        rows["p_r"].append(ref.p)
        rows["q"].append(state.q)
        rows["q_r"].append(ref.q)
        rows["eul"].append(np.rad2deg(euler_from_quat(state.q)))
        rows["eul_r"].append(np.rad2deg(wrap_angle(ref.delta)))
        rows["meas"].append(meas.flat_state())
        rows["u_cmd"].append(u_cmd)
        rows["u"].append(u)
        rows["wind"].append(wind_vel)
        rows["met"].append(met)

        if met[0] > sim.divergence_threshold:
            status, t_div, reason = "diverged", t, "position error above threshold"
            break
        if k == n_ticks:
            break

        ext = ExternalWrench()
        if wind is not None:
            wind_vel = wind.update(t, state.p[2])
            ext = ExternalWrench(f_ext=wind_force(wind_vel, state, cfg.wind))
        try:
            traj = propagate(state, u, ext, sim.dt_sim, n_sub, params, alloc, J_inv)
        except NonFinite:
            status, t_div, reason = "diverged", t, "non-finite state"
            break
        base = k * n_sub
        sensor.push_block([(base + i + 1) * sim.dt_sim for i in range(n_sub)], traj)
        state = RigidBodyState.from_array(traj[-1])

    if status == "diverged":
        log.info("%s/%s seed %d diverged at t=%.2f s (%s)", controller, scenario, seed, t_div, reason)
    met = np.array(rows.pop("met")).reshape(-1, 4)
    arr = {k: np.array(v) for k, v in rows.items()}
    return RunRecord(
        scenario=sc.scenario,
        controller=controller,
        seed=seed,
        takeoff=sc.takeoff,
        t=arr["t"],
        p=arr["p"],
        p_r=arr["p_r"],
        q=arr["q"],
        q_r=arr["q_r"],
        euler_deg=arr["eul"],
        euler_r_deg=arr["eul_r"],
        measured=arr["meas"],
        u_cmd=arr["u_cmd"],
        u=arr["u"],
        wind=arr["wind"],
        e_p=met[:, 0],
        e_a_deg=met[:, 1],
        u_n=met[:, 2],
        u_e=met[:, 3],
        status=status,
        divergence_time=t_div,
        divergence_reason=reason,
    )


METRIC_KEYS = ("e_p", "e_a", "u_n", "u_n_sq", "u_e")


@dataclass
class SummaryStats:
    """Tick-pooled sums of the metrics over the post-take-off part of each run.

    Pooling by tick count makes aggregation associative: merging the stats of
    disjoint run sets gives the stats of their union.
    """

    controller: str
    scenario: str
    runs: int = 0
    diverged: int = 0
    ticks: int = 0
    sums: dict = field(default_factory=lambda: {k: 0.0 for k in METRIC_KEYS})
    max_e_p: float = 0.0
    divergence_times: list = field(default_factory=list)

    @classmethod
    def from_record(cls, rec):
        m = rec.steady_mask()
        stats = cls(rec.controller, rec.scenario, runs=1, diverged=int(rec.diverged), ticks=int(m.sum()))
        values = {"e_p": rec.e_p, "e_a": rec.e_a_deg, "u_n": rec.u_n, "u_n_sq": rec.u_n_sq, "u_e": rec.u_e}
        stats.sums = {k: float(np.sum(values[k][m])) for k in METRIC_KEYS}
        stats.max_e_p = float(rec.e_p[m].max()) if m.any() else 0.0
        if rec.diverged:
            stats.divergence_times = [rec.divergence_time]
        return stats

    def merge(self, other):
        return replace(
            self,
            runs=self.runs + other.runs,
            diverged=self.diverged + other.diverged,
            ticks=self.ticks + other.ticks,
            sums={k: self.sums[k] + other.sums[k] for k in METRIC_KEYS},
            max_e_p=max(self.max_e_p, other.max_e_p),
            divergence_times=self.divergence_times + other.divergence_times,
        )

    @property
    def means(self):
        if self.ticks == 0:
            return {k: float("nan") for k in METRIC_KEYS}
        return {k: self.sums[k] / self.ticks for k in METRIC_KEYS}

    @property
    def label(self):
        return f"{self.controller.upper()}-{self.scenario}" if self.controller != "fc-ideal" else "FC-ideal"


def summarize(records, controller=None, scenario=None):
    stats = SummaryStats(controller or "", scenario or "")
    for rec in records:
        stats = stats.merge(SummaryStats.from_record(rec))
        stats.controller, stats.scenario = rec.controller, rec.scenario
    return stats


def _run_job(args):
    return simulate_run(*args)


def monte_carlo(config, scenario, controller, runs, seed0=0, workers=1):
    """Independent runs with seeds ``seed0 + i``; returns ``(summary, records)``."""
    if runs < 1:
        raise ConfigError("runs must be at least 1")
    jobs = [(scenario, controller, seed0 + i, config) for i in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_job, jobs))
    else:
        records = [_run_job(j) for j in jobs]
    return summarize(records, controller, scenario.upper()), records
