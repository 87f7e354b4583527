"""Interchangeable speed controllers: open-loop, PID, first-order SMC.

All three map a speed error (and, for SMC, its rate) to a normalized voltage
command in [-1, 1]; shoot-through duty for the Z-source stage is scheduled
separately from the commanded envelope and the available battery voltage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError

SQRT2 = math.sqrt(2.0)


@dataclass
class PidParams:
    kp: float = 8e-4            # proportional gain [command per RPM of error]
    ki: float = 5e-4            # integral gain [command per RPM*s]
    kd: float = 1e-5            # derivative gain [command per RPM/s]
    output_min: float = -1.0
    output_max: float = 1.0
    integral_limit: float = 300.0  # anti-windup clamp on the accumulated integral [RPM*s]

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise DomainError("PID gains must be >= 0")
        if not self.output_min < self.output_max:
            raise DomainError("output_min must be < output_max")
        if self.integral_limit <= 0:
            raise DomainError("integral_limit must be > 0")


@dataclass
class SmcParams:
    c: float = 8.0               # sliding-surface slope [1/s]
    disturbance_bound: float = 0.5   # L, bound on the matched disturbance
    alpha: float = 4.949747468305833  # reaching rate; rho = L + alpha/sqrt(2) = 4.0
    boundary_layer: float = 0.15  # phi; 0 recovers the pure sign law
    output_limit: float = 1.0    # symmetric command saturation
    rho_form: str = "constant"   # "constant": rho = L + alpha/sqrt(2); "sigma": L + |sigma|/sqrt(2)

    def __post_init__(self):
        if self.c <= 0:
            raise DomainError("c must be > 0")
        if self.disturbance_bound <= 0:
            raise DomainError("disturbance_bound must be > 0")
        if self.alpha <= 0:
            raise DomainError("alpha must be > 0")
        if self.boundary_layer < 0:
            raise DomainError("boundary_layer must be >= 0")
        if self.rho_form not in ("constant", "sigma"):
            raise DomainError(f"unknown rho_form {self.rho_form!r}")


@dataclass
class ControllerState:
    integral_acc: float = 0.0  # accumulated integral of the error
    prev_error: float = 0.0    # last error sample (backward difference)
    sigma_last: float = 0.0    # last sliding-variable value
    rate_filt: float = 0.0     # filtered error rate (SMC x2 estimate)


@dataclass
class ControlCommand:
    voltage_norm: float = 0.0  # normalized phase-voltage envelope, in [-1, 1]
    delta: float = 0.0         # shoot-through duty request


def pid_step(params: PidParams, state: ControllerState, error: float,
             dt: float) -> tuple[ControlCommand, ControllerState]:
    """One discrete PID update: rectangle-rule integral, backward-difference
    derivative, conditional anti-windup.

    The integral is held (not accumulated) for any step whose output saturates
    in the direction of the current error.
    """
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    lim = params.integral_limit
    integral = min(max(state.integral_acc + error * dt, -lim), lim)
    derivative = (error - state.prev_error) / dt
    u = params.kp * error + params.ki * integral + params.kd * derivative
    if u > params.output_max:
        u = params.output_max
        if error > 0:
            integral = state.integral_acc  # saturated high while pushing higher
    elif u < params.output_min:
        u = params.output_min
        if error < 0:
            integral = state.integral_acc
    new_state = replace(state, integral_acc=integral, prev_error=error)
    return ControlCommand(voltage_norm=u), new_state


def sliding_variable(c: float, x1: float, x2: float) -> float:
    """sigma = x2 + c*x1."""
    if c <= 0:
        raise DomainError(f"c must be > 0, got {c}")
    return x2 + c * x1


def smc_gain(params: SmcParams, sigma: float = 0.0) -> float:
    """Discontinuous-part gain rho.

    Constant form L + alpha/sqrt(2) by default; the "sigma" form
    L + |sigma|/sqrt(2) is kept selectable for comparison.
    """
    if params.rho_form == "sigma":
        return params.disturbance_bound + abs(sigma) / SQRT2
    return params.disturbance_bound + params.alpha / SQRT2


def smc_step(params: SmcParams, state: ControllerState, x1: float,
             x2: float) -> tuple[ControlCommand, ControllerState]:
    """First-order SMC law u = -c*x2 - rho*switch(sigma).

    switch is sign(sigma) for boundary_layer = 0, otherwise the saturation
    sat(sigma/phi) = clamp(sigma/phi, -1, 1).  The command is clipped to
    +/- output_limit.
    """
    sigma = sliding_variable(params.c, x1, x2)
    rho = smc_gain(params, sigma)
    phi = params.boundary_layer
    if phi == 0.0:
        switch = math.copysign(1.0, sigma) if sigma != 0.0 else 0.0
    else:
        switch = min(max(sigma / phi, -1.0), 1.0)
    u = -params.c * x2 - rho * switch
    lim = params.output_limit
    u = min(max(u, -lim), lim)
    new_state = replace(state, sigma_last=sigma)
    return ControlCommand(voltage_norm=u), new_state


def open_loop_step(reference: float, rating: float) -> ControlCommand:
    """Feed-forward command: voltage proportional to the target speed."""
    if rating <= 0:
        raise DomainError(f"rating must be > 0, got {rating}")
    return ControlCommand(voltage_norm=min(max(reference / rating, 0.0), 1.0))


def filtered_error_rate(state: ControllerState, error: float, dt: float,
                        tau_factor: float = 5.0) -> tuple[float, ControllerState]:
    """Estimate the error rate by backward difference through a first-order
    low-pass with time constant tau_factor*dt (no rate sensor in the model)."""
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    raw = (error - state.prev_error) / dt
    rate = state.rate_filt + (raw - state.rate_filt) / tau_factor
    return rate, replace(state, prev_error=error, rate_filt=rate)


def schedule_delta(u: float, v_batt: float, v_bus_target: float,
                   delta_nominal: float, delta_max: float) -> float:
    """Shoot-through duty request for the commanded envelope.

    Boost engages only when the envelope |u|*v_bus_target exceeds the battery
    voltage; the required duty follows from inverting B = 1/(1-2*delta).
    delta_nominal acts as a floor so the Z network stays biased.
    """
    required = abs(u) * v_bus_target
    if required > v_batt > 0.0:
        delta_req = 0.5 * (1.0 - v_batt / required)
    else:
        delta_req = 0.0
    return min(max(max(delta_req, delta_nominal), 0.0), delta_max)
