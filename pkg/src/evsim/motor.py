"""Five-state BLDC motor model with trapezoidal back-EMF.

States are the three phase currents, mechanical speed and electrical rotor
angle.  Phase voltages are line-to-zero; star-point balance is enforced by the
neutral-voltage construction, so i_a + i_b + i_c stays at zero along any
trajectory started balanced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

TWO_PI = 2.0 * math.pi
SIXTY_DEG = math.pi / 3.0

# Crossover below which the torque quotient e.i/w is replaced by the
# algebraically cancelled form lambda * sum(F*i).
OMEGA_EPS = 1e-3

# Six-step gate table, one row per 60-degree electrical sector:
# +1 phase tied high, -1 tied low, 0 open.  Conducting phases are the two
# whose trapezoid sits on a flat top/bottom in that sector.
_COMMUTATION = (
    (1, -1, 0),
    (1, 0, -1),
    (0, 1, -1),
    (-1, 1, 0),
    (-1, 0, 1),
    (0, -1, 1),
)


@dataclass
class MotorParams:
    r_sp: float = 0.15        # stator resistance per phase [ohm]
    l_s: float = 0.3e-3       # self inductance [H]
    l_m: float = 0.1e-3       # mutual inductance [H]
    lambda_m: float = 0.35    # flux linkage amplitude [Wb]
    poles: int = 8            # pole count (even)
    j_inertia: float = 0.05   # rotor + load inertia J_m + J_l [kg m^2]
    b_fric: float = 1e-4      # viscous friction [N m s/rad]
    i_max: float = 120.0      # drive phase-current limit [A]

    def __post_init__(self):
        if self.r_sp <= 0:
            raise DomainError("r_sp must be > 0")
        if not self.l_s > self.l_m >= 0:
            raise DomainError("need l_s > l_m >= 0 so L_s - L_m is invertible")
        if self.lambda_m <= 0:
            raise DomainError("lambda_m must be > 0")
        if self.poles < 2 or self.poles % 2:
            raise DomainError(f"poles must be even and >= 2, got {self.poles}")
        if self.j_inertia <= 0:
            raise DomainError("j_inertia must be > 0")
        if self.b_fric < 0:
            raise DomainError("b_fric must be >= 0")

    @property
    def l_eff(self) -> float:
        """Decoupled phase inductance L_s - L_m."""
        return self.l_s - self.l_m


@dataclass
class MotorState:
    i_a: float = 0.0      # phase currents [A]
    i_b: float = 0.0
    i_c: float = 0.0
    omega_m: float = 0.0  # mechanical speed [rad/s]
    theta_r: float = 0.0  # electrical rotor angle [rad], wrapped to [0, 2*pi)


@dataclass
class PhaseVoltages:
    v_a: float = 0.0   # line-to-zero voltages [V]
    v_b: float = 0.0
    v_c: float = 0.0


def emf_shape(theta: float) -> tuple[float, float, float]:
    """Unit trapezoidal shape functions (F_a, F_b, F_c) at electrical angle theta.

    F_a: +1 on [0, 2pi/3), linear 1 -> -1 on [2pi/3, pi), -1 on [pi, 5pi/3),
    linear -1 -> +1 on [5pi/3, 2pi).  F_b and F_c lag/lead by 120 degrees.
    """
    return (_trapezoid(theta),
            _trapezoid(theta - 2.0 * math.pi / 3.0),
            _trapezoid(theta + 2.0 * math.pi / 3.0))


def _trapezoid(theta: float) -> float:
    th = theta % TWO_PI
    if th < 2.0 * math.pi / 3.0:
        return 1.0
    if th < math.pi:
        return 1.0 - 2.0 * (th - 2.0 * math.pi / 3.0) / SIXTY_DEG
    if th < 5.0 * math.pi / 3.0:
        return -1.0
    return -1.0 + 2.0 * (th - 5.0 * math.pi / 3.0) / SIXTY_DEG


def back_emf(params: MotorParams, omega_m: float,
             theta_r: float) -> tuple[float, float, float]:
    """Phase EMFs e_x = omega_m * lambda_m * F_x(theta_r)."""
    f_a, f_b, f_c = emf_shape(theta_r)
    k = omega_m * params.lambda_m
    return k * f_a, k * f_b, k * f_c


def electromagnetic_torque(e: tuple[float, float, float],
                           i: tuple[float, float, float],
                           omega_m: float,
                           lambda_m: float | None = None,
                           theta_r: float | None = None) -> float:
    """T_e = (e_a*i_a + e_b*i_b + e_c*i_c) / omega_m, finite at standstill.

    Below |omega_m| <= OMEGA_EPS the 0/0 quotient is replaced by the cancelled
    form lambda_m * sum(F_x * i_x), which requires lambda_m and theta_r.
    """
    if abs(omega_m) > OMEGA_EPS:
        return (e[0] * i[0] + e[1] * i[1] + e[2] * i[2]) / omega_m
    if lambda_m is None or theta_r is None:
        raise DomainError("standstill torque needs lambda_m and theta_r")
    f_a, f_b, f_c = emf_shape(theta_r)
    return lambda_m * (f_a * i[0] + f_b * i[1] + f_c * i[2])


def neutral_voltage(v: PhaseVoltages, e: tuple[float, float, float]) -> float:
    """Star-point potential V_no = [(V_ao+V_bo+V_co) - (e_a+e_b+e_c)] / 3."""
    return ((v.v_a + v.v_b + v.v_c) - (e[0] + e[1] + e[2])) / 3.0


def motor_derivatives(params: MotorParams, state: MotorState,
                      v: PhaseVoltages, t_load: float) -> MotorState:
    """Right-hand side of the five-state ODE, returned as a MotorState of rates.

    di_x/dt = (v_x - V_no - R*i_x - e_x) / (L_s - L_m)
    dw/dt   = (T_e - T_l - B*w) / J          (T_l >= 0 opposes motion)
    dth/dt  = (p/2) * w
    """
    e = back_emf(params, state.omega_m, state.theta_r)
    v_no = neutral_voltage(v, e)
    l_eff = params.l_eff
    di_a = (v.v_a - v_no - params.r_sp * state.i_a - e[0]) / l_eff
    di_b = (v.v_b - v_no - params.r_sp * state.i_b - e[1]) / l_eff
    di_c = (v.v_c - v_no - params.r_sp * state.i_c - e[2]) / l_eff
    t_e = electromagnetic_torque(e, (state.i_a, state.i_b, state.i_c),
                                 state.omega_m, params.lambda_m, state.theta_r)
    d_omega = (t_e - t_load - params.b_fric * state.omega_m) / params.j_inertia
    d_theta = 0.5 * params.poles * state.omega_m
    return MotorState(di_a, di_b, di_c, d_omega, d_theta)


def commutation_table(theta_r: float) -> tuple[int, int, int]:
    """Six-step gate pattern (a, b, c) for the sector containing theta_r.

    Per 60-degree sector exactly two phases conduct (+1 high, -1 low) and the
    third is open (0); the conducting pair is the one with |F(theta)| = 1.
    """
    sector = int((theta_r % TWO_PI) / SIXTY_DEG) % 6
    return _COMMUTATION[sector]
