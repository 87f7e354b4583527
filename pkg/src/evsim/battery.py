"""Shepherd/Tremblay-style Li-ion cell model.

Terminal voltage is a closed form of extracted capacity ``it`` (Ah) and the
low-frequency current ``i_hat`` (A), with separate discharge/charge branches
that agree at zero current.  Pack voltage is a series scaling of the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CellEmptyError, DomainError

# Clamp margin keeping "it" away from the Q/(Q-it) pole.
IT_MARGIN_AH = 1e-6


@dataclass
class BatteryParams:
    e0: float = 3.7             # constant (open-circuit) voltage per cell [V]
    kappa_b: float = 0.005      # polarisation constant [V/Ah resp. V, one value for both terms]
    q_ah: float = 75.0          # maximum cell capacity [Ah]
    a_exp: float = 0.25         # exponential-zone amplitude [V]
    b_exp: float = 0.1          # exponential-zone inverse capacity [1/Ah]
    filter_tau: float = 30.0    # low-pass time constant for i_hat [s]
    internal_resistance: float = 0.0  # ohmic drop per cell [ohm]
    n_series: int = 96          # cells in series (pack voltage = n_series * cell voltage)

    def __post_init__(self):
        if self.q_ah <= 0:
            raise DomainError(f"q_ah must be > 0, got {self.q_ah}")
        if self.b_exp < 0:
            raise DomainError(f"b_exp must be >= 0, got {self.b_exp}")
        if self.filter_tau <= 0:
            raise DomainError(f"filter_tau must be > 0, got {self.filter_tau}")
        if self.e0 <= 0:
            raise DomainError(f"e0 must be > 0, got {self.e0}")


@dataclass
class BatteryState:
    it: float = 0.0           # extracted capacity [Ah], >= 0
    i_filtered: float = 0.0   # low-frequency current dynamics i_hat [A]
    v_terminal: float = 0.0   # pack terminal voltage [V]
    soc: float = 1.0          # state of charge, 1 - it/Q


def initial_state(params: BatteryParams, soc: float = 1.0) -> BatteryState:
    """Rested battery at the given state of charge."""
    if not 0.0 < soc <= 1.0:
        raise DomainError(f"soc must be in (0, 1], got {soc}")
    it = (1.0 - soc) * params.q_ah
    v = params.n_series * discharge_voltage(params, it, 0.0)
    return BatteryState(it=it, i_filtered=0.0, v_terminal=v, soc=soc)


def discharge_voltage(params: BatteryParams, it: float, i_hat: float) -> float:
    """Cell voltage on the discharge branch (i_hat >= 0).

    E0 - k*(Q/(Q-it))*i_hat - k*(Q/(Q-it))*it + A*exp(-B*it)

    The polarisation term carries the ``*it`` factor so the model rests at
    E0 + A when fully charged (see the standard Tremblay form).
    """
    if not (math.isfinite(it) and math.isfinite(i_hat)):
        raise DomainError("non-finite battery inputs")
    if it >= params.q_ah:
        raise CellEmptyError(f"extracted capacity {it} Ah >= cell capacity {params.q_ah} Ah")
    if it < 0:
        raise DomainError(f"it must be >= 0, got {it}")
    pol = params.kappa_b * params.q_ah / (params.q_ah - it)
    return params.e0 - pol * i_hat - pol * it + params.a_exp * math.exp(-params.b_exp * it)


def charge_voltage(params: BatteryParams, it: float, i_hat: float) -> float:
    """Cell voltage on the charge branch (i_hat <= 0).

    E0 - k*(Q/(it + 0.1*Q))*i_hat - k*(Q/(Q-it))*it + A*exp(-B*it)
    """
    if not (math.isfinite(it) and math.isfinite(i_hat)):
        raise DomainError("non-finite battery inputs")
    if it >= params.q_ah:
        raise CellEmptyError(f"extracted capacity {it} Ah >= cell capacity {params.q_ah} Ah")
    if it < 0:
        raise DomainError(f"it must be >= 0, got {it}")
    q = params.q_ah
    return (params.e0
            - params.kappa_b * q / (it + 0.1 * q) * i_hat
            - params.kappa_b * q / (q - it) * it
            + params.a_exp * math.exp(-params.b_exp * it))


def battery_step(params: BatteryParams, state: BatteryState,
                 i_load: float, dt: float) -> BatteryState:
    """Advance the battery by one step under pack current ``i_load`` (A).

    Coulomb counting in Ah (positive current discharges), first-order low-pass
    for i_hat, then the branch matching sign(i_hat) gives the cell voltage.
    ``it`` is clamped to [0, Q - 1e-6]; hitting the upper clamp means the cell
    is empty and the voltage is evaluated at the clamp.
    """
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    it = state.it + i_load * dt / 3600.0
    it = min(max(it, 0.0), params.q_ah - IT_MARGIN_AH)
    i_hat = state.i_filtered + (dt / params.filter_tau) * (i_load - state.i_filtered)
    if i_hat >= 0.0:
        v_cell = discharge_voltage(params, it, i_hat)
    else:
        v_cell = charge_voltage(params, it, i_hat)
    v_cell -= i_load * params.internal_resistance
    return BatteryState(
        it=it,
        i_filtered=i_hat,
        v_terminal=params.n_series * v_cell,
        soc=1.0 - it / params.q_ah,
    )
