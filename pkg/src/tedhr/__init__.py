"""Simulation and control of a star-shaped tilted hexarotor.

Two trajectory-tracking controllers, a flatness-based LQR scheme and a
hierarchical force/attitude scheme, flown in a rigid-body simulator with
wind, sensor noise and measurement delay.
"""

from .config import ExperimentConfig, SimConfig, load_config
from .dynamics import ExternalWrench, RigidBodyState, propagate, rk4_step, saturate
from .fc import FcConfig, FlatnessController, lqr_gain
from .harness import RunRecord, SummaryStats, metrics, monte_carlo, simulate_run, summarize
from .hc import HcGains, HierarchicalController
from .scenario import ScenarioConfig, reference_at
from .sensing import Sensor, SensorConfig
from .vehicle import AllocationMatrices, VehicleParams, build_allocation
from .wind import WindConfig, WindField

__version__ = "0.1.0"

__all__ = [
    "AllocationMatrices",
    "ExperimentConfig",
    "ExternalWrench",
    "FcConfig",
    "FlatnessController",
    "HcGains",
    "HierarchicalController",
    "RigidBodyState",
    "RunRecord",
    "ScenarioConfig",
    "Sensor",
    "SensorConfig",
    "SimConfig",
    "SummaryStats",
    "VehicleParams",
    "WindConfig",
    "WindField",
    "build_allocation",
    "load_config",
    "lqr_gain",
    "metrics",
    "monte_carlo",
    "propagate",
    "reference_at",
    "rk4_step",
    "saturate",
    "simulate_run",
    "summarize",
]
