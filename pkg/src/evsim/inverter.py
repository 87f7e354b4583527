"""Averaged Z-source inverter model.

The impedance network (two identical L, two identical C) is reduced to its
averaged dynamics over one PWM period; the shoot-through duty ``delta`` sets
the boost factor B = 1/(1 - 2*delta) and the peak DC link handed to the motor
bridge.  No per-edge switching is simulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SingularityError


@dataclass
class ZsiParams:
    l_henry: float = 500e-6     # each Z-network inductor [H]
    c_farad: float = 1000e-6    # each Z-network capacitor [F]
    delta_max: float = 0.45     # shoot-through duty ceiling, guards the 1/(1-2d) pole
    r_l: float = 0.05           # inductor series resistance [ohm]; damps the averaged LC
    delta_nominal: float = 0.02  # resting shoot-through duty commanded by the scheduler
    v_bus_target: float = 400.0  # bus the duty scheduler tries to maintain at full command [V]

    def __post_init__(self):
        if self.l_henry <= 0 or self.c_farad <= 0:
            raise DomainError("L and C must be > 0")
        if not 0.0 <= self.delta_max < 0.5:
            raise DomainError(f"delta_max must be in [0, 0.5), got {self.delta_max}")


@dataclass
class ZsiState:
    i_l: float = 0.0   # inductor current [A]
    v_c: float = 0.0   # capacitor voltage [V]


def boost_factor(delta: float) -> float:
    """B = 1/(1 - 2*delta), >= 1 on [0, 0.5)."""
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    if delta >= 0.5:
        raise SingularityError(f"delta {delta} at or beyond the boost pole 0.5")
    return 1.0 / (1.0 - 2.0 * delta)


def dc_link_voltage(delta: float, v_s: float) -> float:
    """Peak DC link seen by the motor bridge: B(delta) * v_s."""
    return boost_factor(delta) * v_s


def averaged_output(delta: float, v_s: float, i_s: float,
                    state: ZsiState) -> tuple[float, float]:
    """Averaged output pair (v_o, i_o).

    v_o = (1 + d)*v_s - d*v_L'   with v_L' = v_s - v_C (non-shoot-through
    averaged inductor voltage); i_o = (1 - d)*i_s + d*i_L.
    """
    if delta < 0 or delta >= 0.5:
        raise DomainError(f"delta must be in [0, 0.5), got {delta}")
    if not all(math.isfinite(x) for x in (v_s, i_s, state.i_l, state.v_c)):
        raise DomainError("non-finite inverter inputs")
    v_l = v_s - state.v_c
    v_o = (1.0 + delta) * v_s - delta * v_l
    i_o = (1.0 - delta) * i_s + delta * state.i_l
    return v_o, i_o


def zsi_derivatives(params: ZsiParams, state: ZsiState, v_s: float,
                    i_o: float, delta: float) -> tuple[float, float]:
    """Averaged LC state derivatives (di_L/dt, dv_C/dt).

    di_L/dt = (d*v_C + (1-d)*(v_s - v_C) - r_l*i_L) / L
    dv_C/dt = (1-d)*(i_L - i_o) / C

    r_l is the inductor ESR; without it the averaged network is a lossless
    oscillator and never settles.  Steady state with i_o = 0 is
    v_C = v_s*(1-d)/(1-2d), i_L = 0.
    """
    di = (delta * state.v_c + (1.0 - delta) * (v_s - state.v_c)
          - params.r_l * state.i_l) / params.l_henry
    dv = (1.0 - delta) * (state.i_l - i_o) / params.c_farad
    return di, dv


def zsi_step(params: ZsiParams, state: ZsiState, v_s: float, i_o: float,
             delta: float, dt: float) -> ZsiState:
    """One fixed-step RK4 update of the averaged LC state (inputs held)."""
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if delta < 0 or delta >= 0.5:
        raise DomainError(f"delta must be in [0, 0.5), got {delta}")

    def f(i_l: float, v_c: float) -> tuple[float, float]:
        return zsi_derivatives(params, ZsiState(i_l, v_c), v_s, i_o, delta)

    k1i, k1v = f(state.i_l, state.v_c)
    k2i, k2v = f(state.i_l + 0.5 * dt * k1i, state.v_c + 0.5 * dt * k1v)
    k3i, k3v = f(state.i_l + 0.5 * dt * k2i, state.v_c + 0.5 * dt * k2v)
    k4i, k4v = f(state.i_l + dt * k3i, state.v_c + dt * k3v)
    return ZsiState(
        i_l=state.i_l + dt / 6.0 * (k1i + 2 * k2i + 2 * k3i + k4i),
        v_c=state.v_c + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )
