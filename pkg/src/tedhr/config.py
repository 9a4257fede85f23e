"""Experiment configuration and its JSON file form.

The file is a JSON object with optional sections ``vehicle``, ``gains_fc``,
``gains_hc``, ``sensor``, ``wind``, ``scenario`` and ``sim``; missing keys take
the defaults of the corresponding dataclass.
"""

import json
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .fc import FcConfig
from .hc import HcGains
from .scenario import ScenarioConfig
from .sensing import SensorConfig
from .vehicle import VehicleParams
from .wind import WindConfig

SECTIONS = ("vehicle", "gains_fc", "gains_hc", "sensor", "wind", "scenario", "sim")


@dataclass
class SimConfig:
    dt_sim: float = 0.001
    dt_ctrl: float = 0.01
    divergence_threshold: float = 5.0

    def __post_init__(self):
        if not 0 < self.dt_sim <= 0.01:
            raise ConfigError("dt_sim must lie in (0, 0.01]")
        if self.dt_ctrl < self.dt_sim:
            raise ConfigError("dt_ctrl must be at least dt_sim")
        n = self.dt_ctrl / self.dt_sim
        if abs(n - round(n)) > 1e-9:
            raise ConfigError("dt_ctrl must be an integer multiple of dt_sim")
        if self.divergence_threshold <= 0:
            raise ConfigError("divergence_threshold must be positive")

    @property
    def substeps(self):
        return int(round(self.dt_ctrl / self.dt_sim))

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class ExperimentConfig:
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    gains_fc: FcConfig = field(default_factory=FcConfig)
    gains_hc: HcGains = field(default_factory=HcGains)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    wind: WindConfig = field(default_factory=WindConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    sim: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        if abs(self.sim.dt_ctrl * self.sensor.sample_rate - 1.0) > 1e-9:
            raise ConfigError("controllers run on the sensing grid: dt_ctrl must equal 1 / sample_rate")

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        kinds = {
            "vehicle": VehicleParams,
            "gains_fc": FcConfig,
            "gains_hc": HcGains,
            "sensor": SensorConfig,
            "wind": WindConfig,
            "scenario": ScenarioConfig,
            "sim": SimConfig,
        }
        return cls(**{name: kinds[name].from_dict(d[name]) for name in SECTIONS if name in d})

    def with_scenario(self, scenario_id):
        return replace(self, scenario=replace(self.scenario, scenario=scenario_id))

    def with_timing(self, dt_ctrl=None, dt_sim=None):
        sim = SimConfig(dt_sim or self.sim.dt_sim, dt_ctrl or self.sim.dt_ctrl, self.sim.divergence_threshold)
        sensor = replace(self.sensor, sample_rate=1.0 / sim.dt_ctrl)
        return replace(self, sim=sim, sensor=sensor)


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return ExperimentConfig.from_dict(data)
