"""evsim: deterministic EV drivetrain simulation.

Battery -> Z-source inverter -> BLDC motor -> longitudinal vehicle, driven by
interchangeable open-loop / PID / sliding-mode speed controllers over fixed
references or drive cycles.
"""

__version__ = "0.1.0"

from .battery import BatteryParams, BatteryState, battery_step
from .controllers import (ControlCommand, ControllerState, PidParams,
                          SmcParams, open_loop_step, pid_step, smc_step)
from .drivecycle import DriveCycle, load_cycle, parse_cycle, sample_speed, synth_cycle
from .engine import ScenarioConfig, SimLog, export_log, run_batch, run_scenario
from .inverter import ZsiParams, ZsiState, boost_factor, dc_link_voltage
from .metrics import MetricsReport, rmse, settling_time, steady_state
from .motor import MotorParams, MotorState, PhaseVoltages
from .vehicle import VehicleParams, VehicleState

__all__ = [
    "BatteryParams", "BatteryState", "battery_step",
    "ControlCommand", "ControllerState", "PidParams", "SmcParams",
    "open_loop_step", "pid_step", "smc_step",
    "DriveCycle", "load_cycle", "parse_cycle", "sample_speed", "synth_cycle",
    "ScenarioConfig", "SimLog", "export_log", "run_batch", "run_scenario",
    "ZsiParams", "ZsiState", "boost_factor", "dc_link_voltage",
    "MetricsReport", "rmse", "settling_time", "steady_state",
    "MotorParams", "MotorState", "PhaseVoltages",
    "VehicleParams", "VehicleState",
    "__version__",
]
