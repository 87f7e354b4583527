"""Longitudinal vehicle load model.

Resistive forces (grade, rolling, aerodynamic), tractive force/power/energy,
wheel torque, axle loads with dynamic transfer, and adhesion-limited tractive
effort.  The kinematic frame transform and slip angles are standalone
operations; closed-loop scenarios are longitudinal-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, LowSpeedError

V_EPS = 0.1  # low-speed guard for slip angles [m/s]


@dataclass
class VehicleParams:
    mass: float = 1200.0      # gross mass [kg]
    mu: float = 0.013         # rolling resistance coefficient
    rho_air: float = 1.2      # air density [kg/m^3]
    a_f: float = 2.2          # frontal area [m^2]
    c_d: float = 0.3          # drag coefficient
    r_wheel: float = 0.3      # wheel radius [m]
    lambda_rot: float = 1.04  # rotational inertia constant (>= 1)
    j_rot_sum: float = 8.0    # summed rotational inertia [kg m^2]
    l_a: float = 1.3          # CG to front axle [m]
    l_b: float = 1.3          # CG to rear axle [m]
    hg: float = 0.55          # CG height [m]
    eta_adhesion: float = 0.8  # road adhesion coefficient
    gear_ratio: float = 8.0   # motor-to-wheel ratio
    g: float = 9.81           # gravity [m/s^2]

    def __post_init__(self):
        for name in ("mass", "mu", "rho_air", "a_f", "c_d", "r_wheel",
                     "j_rot_sum", "l_a", "l_b", "hg", "eta_adhesion",
                     "gear_ratio", "g"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0")
        if self.lambda_rot < 1.0:
            raise DomainError("lambda_rot must be >= 1")

    @property
    def wheelbase(self) -> float:
        return self.l_a + self.l_b

    @property
    def effective_mass(self) -> float:
        """m + sum(J_rot)/r_wheel^2, the mass seen by acceleration."""
        return self.mass + self.j_rot_sum / self.r_wheel ** 2


@dataclass
class VehicleState:
    v: float = 0.0            # longitudinal speed [m/s], >= 0
    distance: float = 0.0     # traveled distance [m]
    grade_theta: float = 0.0  # road inclination [rad]


def resistive_forces(params: VehicleParams, v: float,
                     theta: float) -> tuple[float, float, float]:
    """(F_g, F_r, F_w): climbing, rolling, aerodynamic drag [N].

    F_g = m*g*sin(theta); F_r = mu*m*g*cos(theta), zero at rest;
    F_w = 0.5*rho*A_f*C_D*v^2.
    """
    if v < 0:
        raise DomainError(f"v must be >= 0, got {v}")
    f_g = params.mass * params.g * math.sin(theta)
    f_r = params.mu * params.mass * params.g * math.cos(theta) if v > 0 else 0.0
    f_w = 0.5 * params.rho_air * params.a_f * params.c_d * v * v
    return f_g, f_r, f_w


def tractive_force(params: VehicleParams, v: float, dv_dt: float,
                   theta: float, use_effective_mass: bool = False) -> float:
    """Resistive forces plus the inertial term m*dv/dt.

    With use_effective_mass the rotating-parts inertia is included
    (accel_resistance's effective mass).
    """
    f_g, f_r, f_w = resistive_forces(params, v, theta)
    m = params.effective_mass if use_effective_mass else params.mass
    return f_g + f_r + f_w + m * dv_dt


def accel_resistance(params: VehicleParams, dv_dt: float) -> float:
    """F_a = (m + sum(J_rot)/r_wheel^2) * dv/dt."""
    return params.effective_mass * dv_dt


def tractive_power_energy(f_tr: float, v: float, running_e: float, dt: float,
                          prev_power: float | None = None) -> tuple[float, float]:
    """Instantaneous tractive power and running-energy update.

    Returns (p, e') with p = f_tr*v; the energy increment is the trapezoid
    (prev_power + p)/2 * dt when the caller supplies the previous sample,
    otherwise the rectangle p*dt.
    """
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    p = f_tr * v
    if prev_power is None:
        return p, running_e + p * dt
    return p, running_e + 0.5 * (prev_power + p) * dt


def wheel_torque(f_tr: float, r_wheel: float) -> float:
    """Wheel torque = F_tractive * r_wheel."""
    if r_wheel <= 0:
        raise DomainError(f"r_wheel must be > 0, got {r_wheel}")
    return f_tr * r_wheel


def shaft_load_torque(params: VehicleParams, v: float, theta: float) -> float:
    """Resistive load reflected to the motor shaft through the gear.

    Rolling and drag oppose the current direction of travel; grade keeps its
    sign.  Zero at standstill so a parked vehicle stays parked.
    """
    sign = 1.0 if v > 0 else (-1.0 if v < 0 else 0.0)
    f_g = params.mass * params.g * math.sin(theta)
    f_r = params.mu * params.mass * params.g * math.cos(theta) * sign
    f_w = 0.5 * params.rho_air * params.a_f * params.c_d * v * v * sign
    return (f_g + f_r + f_w) * params.r_wheel / params.gear_ratio


def axle_loads(params: VehicleParams, state: VehicleState, f_w: float,
               f_g: float, dv_dt: float) -> tuple[float, float]:
    """Front/rear normal loads with static split plus dynamic transfer.

    transfer = [mu*m*g*cos(th)*r_wheel (v>0) + hg*(F_w + F_g + lam*m*dv/dt)]/L
    w_f = (L_b/L)*m*g*cos(th) - transfer;  w_r = (L_a/L)*m*g*cos(th) + transfer
    so w_f + w_r = m*g*cos(th) exactly.
    """
    length = params.wheelbase
    if length <= 0:
        raise DomainError("wheelbase must be > 0")
    theta = state.grade_theta
    mg_cos = params.mass * params.g * math.cos(theta)
    rolling_couple = params.mu * mg_cos * params.r_wheel if state.v > 0 else 0.0
    transfer = (rolling_couple
                + params.hg * (f_w + f_g + params.lambda_rot * params.mass * dv_dt)) / length
    w_f = params.l_b / length * mg_cos - transfer
    w_r = params.l_a / length * mg_cos + transfer
    return w_f, w_r


def max_tractive_effort(params: VehicleParams, w_f: float,
                        w_r: float) -> tuple[float, float]:
    """Adhesion-limited tractive force per axle: eta * normal load."""
    if w_f < 0 or w_r < 0:
        raise DomainError("axle loads must be >= 0")
    return params.eta_adhesion * w_f, params.eta_adhesion * w_r


def clamp_tractive(requested: float, f_max: float) -> tuple[float, bool]:
    """Limit a requested tractive force to +/- f_max; flags when it clips."""
    if abs(requested) <= f_max:
        return requested, False
    return math.copysign(f_max, requested), True


def body_frame_transform(x0: float, y0: float, theta: float, dx: float,
                         dy: float) -> tuple[float, float]:
    """[x, y] = [x0, y0] + R(theta) [dx, dy] with the planar rotation matrix."""
    c, s = math.cos(theta), math.sin(theta)
    return x0 + c * dx - s * dy, y0 + s * dx + c * dy


def slip_angles(v_x: float, v_y: float, omega: float, l_f: float, l_r: float,
                delta_f: float, delta_r: float) -> tuple[float, float]:
    """Front/rear slip angles.

    alpha_f = (v_y + omega*l_f)/v_x - delta_f
    alpha_r = (v_y - omega*l_r)/v_x + delta_r
    """
    if abs(v_x) <= V_EPS:
        raise LowSpeedError(f"slip angles undefined for |v_x| <= {V_EPS} m/s")
    alpha_f = (v_y + omega * l_f) / v_x - delta_f
    alpha_r = (v_y - omega * l_r) / v_x + delta_r
    return alpha_f, alpha_r
