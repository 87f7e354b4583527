"""Exception types shared across the simulator."""


class EvsimError(Exception):
    """Base class for all simulator errors."""


class DomainError(EvsimError, ValueError):
    """An input is outside the valid domain of an operation."""


class ConfigError(EvsimError):
    """Scenario configuration is missing, malformed, or inconsistent."""


class CycleFormatError(ConfigError):
    """Drive-cycle file violates the CSV contract (bad header, time order, ...)."""


class CellEmptyError(DomainError):
    """Battery extracted capacity reached the cell limit (polarisation pole)."""


class SingularityError(DomainError):
    """Shoot-through duty at or beyond the 1/(1-2*delta) pole."""


class LowSpeedError(DomainError):
    """Slip angles are undefined below the longitudinal speed guard."""


class NumericalBlowupError(EvsimError):
    """Integration produced a non-finite state.

    Carries the simulation time and a snapshot of the composite state so a
    failed run can be diagnosed.
    """

    def __init__(self, t: float, state, message: str = "non-finite state"):
        self.t = t
        self.state = state
        super().__init__(f"{message} at t={t:.6f} s; state={state}")
