"""Scalar performance metrics over simulation logs.

RMSE, settling time (enter-and-stay band), steady-state value and overshoot:
the rows of the controller comparison table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass
class MetricsReport:
    rmse: float
    settling_time_s: float | None   # None = never settled
    steady_state_value: float
    overshoot_pct: float


def rmse(actual, estimated) -> float:
    """sqrt(sum((x - x_hat)^2) / N)."""
    a = np.asarray(actual, dtype=float)
    b = np.asarray(estimated, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"signal length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise DomainError("empty signals")
    d = a - b
    return float(np.sqrt(np.mean(d * d)))


def settling_time(signal, reference: float, band_pct: float,
                  dt: float) -> float | None:
    """Earliest time after which the signal stays within the band forever.

    band_pct is a fraction of |reference| (0.02 = a +/-2 % band).  Returns
    None when the final sample is still outside the band.
    """
    if band_pct <= 0:
        raise DomainError(f"band_pct must be > 0, got {band_pct}")
    if reference == 0:
        raise DomainError("relative band undefined for reference 0; use an absolute band")
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    s = np.asarray(signal, dtype=float)
    if s.size == 0:
        raise DomainError("empty signal")
    outside = np.abs(s - reference) > band_pct * abs(reference)
    if not outside.any():
        return 0.0
    last_out = int(np.nonzero(outside)[0][-1])
    if last_out == s.size - 1:
        return None
    return (last_out + 1) * dt


def steady_state(signal, window_fraction: float = 0.1) -> float:
    """Mean of the final window_fraction of samples."""
    if not 0.0 < window_fraction <= 1.0:
        raise DomainError(f"window_fraction must be in (0, 1], got {window_fraction}")
    s = np.asarray(signal, dtype=float)
    if s.size == 0:
        raise DomainError("empty signal")
    n = max(1, int(round(window_fraction * s.size)))
    return float(np.mean(s[-n:]))


def overshoot_pct(signal, reference: float) -> float:
    """Peak excursion above the reference, in percent of the reference."""
    if reference == 0:
        raise DomainError("overshoot undefined for reference 0")
    s = np.asarray(signal, dtype=float)
    if s.size == 0:
        raise DomainError("empty signal")
    peak = float(np.max(s)) if reference > 0 else float(np.min(s))
    return max(0.0, (peak - reference) / reference * 100.0)


def report(signal, reference: float, dt: float, band_pct: float = 0.02,
           window_fraction: float = 0.1, reference_signal=None) -> MetricsReport:
    """Bundle the four metrics for one tracked signal.

    RMSE is computed against reference_signal when given (time-varying
    target), else against the constant reference.
    """
    s = np.asarray(signal, dtype=float)
    ref_sig = (np.full_like(s, reference) if reference_signal is None
               else np.asarray(reference_signal, dtype=float))
    return MetricsReport(
        rmse=rmse(s, ref_sig),
        settling_time_s=settling_time(s, reference, band_pct, dt),
        steady_state_value=steady_state(s, window_fraction),
        overshoot_pct=overshoot_pct(s, reference),
    )
