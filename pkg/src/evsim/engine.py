"""Fixed-step simulation engine.

Wires battery -> Z-source inverter -> BLDC motor -> longitudinal vehicle with
the selected controller and runs one of three scenarios:

  open_loop              fixed reference, feed-forward voltage, no feedback
  closed_loop            PID or SMC on motor speed, constant load torque
  closed_loop_dynamics   reference from a drive cycle, load torque and
                         reflected inertia from the vehicle model,
                         regeneration currents fed back to the battery

Runs are deterministic: identical configs produce byte-identical logs.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel
from .battery import BatteryParams
from .controllers import PidParams, SmcParams
from .drivecycle import DriveCycle
from .errors import ConfigError, NumericalBlowupError
from .inverter import ZsiParams
from .motor import MotorParams
from .vehicle import VehicleParams

SCENARIO_KINDS = ("open_loop", "closed_loop", "closed_loop_dynamics")
CONTROLLER_KINDS = ("openloop", "pid", "smc")

LOG_COLUMNS = ("t_s", "ref", "speed_rpm", "v_kmph", "torque_nm", "tload_nm",
               "theta_rad", "soc", "v_batt", "v_dclink", "u_cmd", "sigma",
               "p_tract_w")


@dataclass
class ScenarioConfig:
    kind: str = "closed_loop"
    dt: float = 1e-4                  # integration step [s]
    duration: float = 2.0             # [s]
    controller: str = "smc"
    reference_rpm: float = 1000.0     # non-dynamics scenarios
    reference_steps: list[tuple[float, float]] | None = None  # optional (t, rpm) schedule
    load_torque: float = 0.0          # constant shaft load, non-dynamics [N m]
    cycle: DriveCycle | None = None   # required for closed_loop_dynamics
    battery: BatteryParams = field(default_factory=BatteryParams)
    zsi: ZsiParams = field(default_factory=ZsiParams)
    motor: MotorParams = field(default_factory=MotorParams)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    # The baseline PID gets only a conservative dynamic-braking floor, so
    # deceleration is mostly coasting with feeble regeneration; the SMC keeps
    # the full symmetric command range.
    pid: PidParams = field(default_factory=lambda: PidParams(output_min=-0.02))
    smc: SmcParams = field(default_factory=SmcParams)
    soc0: float = 0.9                 # initial state of charge
    regen_limit_c: float = 2.0        # regeneration current cap, multiples of Q
    norm_rpm: float | None = None     # SMC error normalization [RPM]; None = full-command
    #                                   speed slew per second (control-effectiveness scale)
    rating_rpm: float | None = None   # open-loop full-scale; None = no-load speed at u=1
    rate_filter_tau_s: float = 0.005  # error-rate filter time constant [s]

    def validate(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.controller not in CONTROLLER_KINDS:
            raise ConfigError(f"unknown controller {self.controller!r}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.duration < self.dt:
            raise ConfigError(f"duration {self.duration} shorter than one step {self.dt}")
        if self.kind == "closed_loop_dynamics" and self.cycle is None:
            raise ConfigError("closed_loop_dynamics requires a drive cycle")
        if not 0.0 < self.soc0 <= 1.0:
            raise ConfigError(f"soc0 must be in (0, 1], got {self.soc0}")


@dataclass
class SimLog:
    """Per-step records of one run; columns as in LOG_COLUMNS."""

    data: np.ndarray           # shape (n_records, 13)
    scenario: str = ""
    controller: str = ""
    dt: float = 0.0

    def __len__(self) -> int:
        return self.data.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, LOG_COLUMNS.index(name)]

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]

    @property
    def ref(self) -> np.ndarray:
        return self.data[:, 1]

    @property
    def speed_rpm(self) -> np.ndarray:
        return self.data[:, 2]

    @property
    def v_kmph(self) -> np.ndarray:
        return self.data[:, 3]

    @property
    def torque_nm(self) -> np.ndarray:
        return self.data[:, 4]

    @property
    def soc(self) -> np.ndarray:
        return self.data[:, 7]

    @property
    def u_cmd(self) -> np.ndarray:
        return self.data[:, 10]

    @property
    def sigma(self) -> np.ndarray:
        return self.data[:, 11]


def rk4_step(derivative_fn, state, t: float, dt: float):
    """One classical 4th-order step of ``y' = derivative_fn(t, y)``.

    ``state`` may be a float or a numpy array; the command/input side of the
    model is expected to be frozen inside derivative_fn (zero-order hold).
    """
    if dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    y = np.asarray(state, dtype=float)
    k1 = np.asarray(derivative_fn(t, y))
    k2 = np.asarray(derivative_fn(t + 0.5 * dt, y + 0.5 * dt * k1))
    k3 = np.asarray(derivative_fn(t + 0.5 * dt, y + 0.5 * dt * k2))
    k4 = np.asarray(derivative_fn(t + dt, y + dt * k3))
    if not (np.all(np.isfinite(k1)) and np.all(np.isfinite(k4))):
        raise NumericalBlowupError(t, y, "non-finite derivative")
    result = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if np.ndim(state) == 0:
        return float(result)
    return result


def _nominal_bus(config: ScenarioConfig) -> float:
    from .battery import initial_state

    v0 = initial_state(config.battery, config.soc0).v_terminal
    return v0 / (1.0 - 2.0 * config.zsi.delta_nominal)


def no_load_rating_rpm(config: ScenarioConfig) -> float:
    """No-load speed at full command: half the nominal DC link over lambda."""
    return (0.5 * _nominal_bus(config) / config.motor.lambda_m) * _kernel.RAD_PER_S_TO_RPM


def effective_inertia(config: ScenarioConfig) -> float:
    """Inertia at the motor shaft; the dynamics scenario reflects the vehicle
    through the rigid driveline (gear, wheel radius)."""
    j = config.motor.j_inertia
    if config.kind == "closed_loop_dynamics":
        v = config.vehicle
        ratio = v.r_wheel / v.gear_ratio
        j += v.effective_mass * ratio * ratio
    return j


def control_effectiveness_rpm(config: ScenarioConfig) -> float:
    """Full-command speed slew per second [RPM]: stall torque over inertia.

    Used as the SMC error normalization so the closed loop looks like a
    unit-gain double integrator regardless of the plant behind it.
    """
    m = config.motor
    t_stall = m.lambda_m * _nominal_bus(config) / m.r_sp
    return t_stall / effective_inertia(config) * _kernel.RAD_PER_S_TO_RPM


def _pack(config: ScenarioConfig):
    m = config.motor
    z = config.zsi
    b = config.battery
    v = config.vehicle
    mp = np.array([m.r_sp, m.l_eff, m.lambda_m, 0.5 * m.poles,
                   m.j_inertia, m.b_fric, m.i_max])
    zp = np.array([z.l_henry, z.c_farad, z.r_l, z.delta_max, z.delta_nominal,
                   z.v_bus_target])
    it0 = (1.0 - config.soc0) * b.q_ah
    bp = np.array([b.e0, b.kappa_b, b.q_ah, b.a_exp, b.b_exp, b.filter_tau,
                   b.internal_resistance, float(b.n_series),
                   config.regen_limit_c * b.q_ah, it0])
    vp = np.array([v.mass, v.mu, 0.5 * v.rho_air * v.a_f * v.c_d,
                   v.r_wheel, v.gear_ratio, v.effective_mass, v.g])
    rating = config.rating_rpm if config.rating_rpm is not None else no_load_rating_rpm(config)
    norm = config.norm_rpm if config.norm_rpm is not None else control_effectiveness_rpm(config)
    p = config.pid
    s = config.smc
    cp = np.array([p.kp, p.ki, p.kd, p.output_min, p.output_max,
                   p.integral_limit,
                   s.c, s.disturbance_bound, s.alpha, s.boundary_layer,
                   s.output_limit, 1.0 if s.rho_form == "sigma" else 0.0,
                   norm, rating, config.rate_filter_tau_s,
                   config.load_torque])
    return mp, zp, bp, vp, cp


def run_scenario(config: ScenarioConfig) -> SimLog:
    """Run one scenario to completion and return its log.

    Raises NumericalBlowupError (with time and state row) if integration
    produces a non-finite value.
    """
    config.validate()
    n_steps = int(config.duration / config.dt + 1e-9)
    scen_kind = SCENARIO_KINDS.index(config.kind)
    ctrl_kind = CONTROLLER_KINDS.index(config.controller)

    if config.kind == "closed_loop_dynamics":
        cyc_t = config.cycle.times
        cyc_v = config.cycle.speeds
        cyc_g = config.cycle.grades if config.cycle.grades is not None else np.empty(0)
        ref_t = np.zeros(1)
        ref_v = np.zeros(1)
    else:
        steps = config.reference_steps or [(0.0, config.reference_rpm)]
        ref_t = np.array([t for t, _ in steps], dtype=float)
        ref_v = np.array([r for _, r in steps], dtype=float)
        if ref_t[0] != 0.0 or np.any(np.diff(ref_t) <= 0):
            raise ConfigError("reference_steps must start at t=0 and increase")
        cyc_t = np.zeros(1)
        cyc_v = np.zeros(1)
        cyc_g = np.empty(0)

    mp, zp, bp, vp, cp = _pack(config)
    out = np.empty((n_steps + 1, _kernel.N_COLS))
    fail = _kernel.simulate_loop(n_steps, config.dt, scen_kind, ctrl_kind,
                                 ref_t, ref_v, cyc_t, cyc_v, cyc_g,
                                 mp, zp, bp, vp, cp, out)
    if fail >= 0:
        raise NumericalBlowupError(fail * config.dt, out[fail])
    return SimLog(data=out, scenario=config.kind, controller=config.controller,
                  dt=config.dt)


def run_batch(configs) -> list[SimLog]:
    """Run several independent scenarios; results ordered like the input."""
    with concurrent.futures.ThreadPoolExecutor() as pool:
        return list(pool.map(run_scenario, configs))


def export_log(log: SimLog, path) -> None:
    """Write the log as CSV with a fixed column order and 17-significant-digit
    formatting, so exports round-trip exactly and are byte-stable."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(LOG_COLUMNS) + "\n")
        for row in log.data:
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")


def read_log(path) -> SimLog:
    """Re-parse an exported CSV log."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != ",".join(LOG_COLUMNS):
            raise ConfigError(f"unexpected log header in {path}")
        rows = [[float(x) for x in ln.split(",")] for ln in fh if ln.strip()]
    return SimLog(data=np.asarray(rows, dtype=float).reshape(-1, len(LOG_COLUMNS)))
