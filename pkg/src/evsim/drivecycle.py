"""Drive-cycle ingestion, resampling and synthesis.

A cycle is an ordered (t [s], target speed [km/h]) table with optional road
grade [rad]; lookup is piecewise linear with clamping outside the span.  The
synthetic generator reproduces the two-phase shape used for benchmarking:
steady ramp-and-plateau driving first, seeded random driving after.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CycleFormatError, DomainError

HEADER = "t_s,v_kmph"
HEADER_GRADE = "t_s,v_kmph,grade_rad"

SYNTH_MAX_ACCEL = 3.0      # hard bound on generated accelerations [m/s^2]
SYNTH_PLATEAU_S = 60.0     # initial constant-speed hold [s]
SYNTH_MIN_DURATION = 60.0


@dataclass
class DriveCycle:
    times: np.ndarray                 # [s], strictly increasing, starts at 0
    speeds: np.ndarray                # target speed [km/h], >= 0
    grades: np.ndarray | None = None  # road inclination [rad], optional
    name: str = "cycle"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.speeds = np.asarray(self.speeds, dtype=float)
        if self.grades is not None:
            self.grades = np.asarray(self.grades, dtype=float)
        _validate(self.times, self.speeds, self.grades)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def initial_plateau(self) -> tuple[float, float]:
        """(speed, end time) of the leading constant-speed segment."""
        v0 = self.speeds[0]
        end = self.times[0]
        for t, v in zip(self.times, self.speeds):
            if v != v0:
                break
            end = t
        return float(v0), float(end)


def _validate(times: np.ndarray, speeds: np.ndarray, grades) -> None:
    if times.ndim != 1 or len(times) < 2:
        raise CycleFormatError("a cycle needs at least 2 samples")
    if len(times) != len(speeds):
        raise CycleFormatError("time and speed columns differ in length")
    if grades is not None and len(grades) != len(times):
        raise CycleFormatError("grade column length mismatch")
    if times[0] != 0.0:
        raise CycleFormatError(f"cycle must start at t=0, got t0={times[0]}")
    diffs = np.diff(times)
    if np.any(diffs <= 0):
        bad = int(np.argmax(diffs <= 0)) + 2  # 1-based sample index of offender
        raise CycleFormatError(f"time must be strictly increasing (sample {bad})")
    if np.any(speeds < 0):
        bad = int(np.argmax(speeds < 0)) + 1
        raise CycleFormatError(f"negative target speed (sample {bad})")


def parse_cycle(text: str, name: str = "cycle") -> DriveCycle:
    """Parse the CSV format ``t_s,v_kmph[,grade_rad]`` into a DriveCycle."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CycleFormatError("empty cycle file")
    header = lines[0].replace(" ", "")
    if header == HEADER:
        ncols = 2
    elif header == HEADER_GRADE:
        ncols = 3
    else:
        raise CycleFormatError(f"bad header {lines[0]!r}, expected {HEADER!r}"
                               f" or {HEADER_GRADE!r}")
    if len(lines) < 2:
        raise CycleFormatError("cycle file has a header but no samples")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != ncols:
            raise CycleFormatError(f"line {lineno}: expected {ncols} columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise CycleFormatError(f"line {lineno}: {exc}") from exc
    data = np.asarray(rows, dtype=float)
    grades = data[:, 2] if ncols == 3 else None
    return DriveCycle(times=data[:, 0], speeds=data[:, 1], grades=grades, name=name)


def render_cycle(cycle: DriveCycle) -> str:
    """Inverse of parse_cycle; numeric values round-trip exactly."""
    cols = 3 if cycle.grades is not None else 2
    out = [HEADER_GRADE if cols == 3 else HEADER]
    for k in range(len(cycle.times)):
        row = [format(cycle.times[k], ".17g"), format(cycle.speeds[k], ".17g")]
        if cols == 3:
            row.append(format(cycle.grades[k], ".17g"))
        out.append(",".join(row))
    return "\n".join(out) + "\n"


def load_cycle(path) -> DriveCycle:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_cycle(fh.read(), name=str(path))


def save_cycle(cycle: DriveCycle, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_cycle(cycle))


def sample_speed(cycle: DriveCycle, t: float) -> float:
    """Target speed [km/h] at time t; clamps before the start / after the end."""
    return float(np.interp(t, cycle.times, cycle.speeds))


def sample_grade(cycle: DriveCycle, t: float) -> float:
    """Road grade [rad] at time t (0 when the cycle carries no grade column)."""
    if cycle.grades is None:
        return 0.0
    return float(np.interp(t, cycle.times, cycle.grades))


def synth_cycle(duration: float, seed: int, peak_kmph: float = 55.0,
                dt_sample: float = 1.0) -> DriveCycle:
    """Deterministic synthetic cycle from a seed.

    Starts with a step to a cruise plateau held for SYNTH_PLATEAU_S, then
    piecewise-linear ramps between seeded plateaus for the first half, then
    random per-second speed perturbations with accelerations bounded by
    SYNTH_MAX_ACCEL for the second half.
    """
    if duration <= SYNTH_MIN_DURATION:
        raise DomainError(f"duration must exceed {SYNTH_MIN_DURATION} s, got {duration}")
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(round(duration / dt_sample)) + 1
    times = np.arange(n) * dt_sample
    speeds = np.empty(n)

    kmph_per_step = SYNTH_MAX_ACCEL * 3.6 * dt_sample  # speed change at the accel bound
    v_plateau = float(rng.uniform(0.2, 0.32) * peak_kmph)
    half = duration / 2.0

    # Phase 1: step to the plateau, hold, then gentle ramp/hold cruising.
    k = 0
    while k < n and times[k] <= SYNTH_PLATEAU_S:
        speeds[k] = v_plateau
        k += 1
    v = v_plateau
    target = v_plateau
    hold_left = 0.0
    while k < n and times[k] <= half:
        if hold_left > 0.0:
            hold_left -= dt_sample
        elif v == target:
            target = float(rng.uniform(0.2, 1.0) * peak_kmph)
            hold_left = float(rng.uniform(5.0, 20.0))
        step = min(kmph_per_step * 0.4, abs(target - v))
        v += step if target > v else -step
        speeds[k] = v
        k += 1

    # Phase 2: random driving; sustained seeded ramps toward random targets
    # (occasionally near-stops), short holds, accelerations within the bound.
    target = v
    rate = kmph_per_step
    hold_left = 0.0
    while k < n:
        if hold_left > 0.0:
            hold_left -= dt_sample
        elif abs(v - target) < 1e-9:
            if rng.uniform() < 0.4:
                target = float(rng.uniform(0.0, 0.1) * peak_kmph)
            else:
                target = float(rng.uniform(0.3, 1.0) * peak_kmph)
            rate = float(rng.uniform(0.2, 0.5)) * kmph_per_step
            hold_left = float(rng.uniform(2.0, 8.0))
        step = min(rate, abs(target - v))
        v = min(max(v + (step if target > v else -step), 0.0), peak_kmph)
        speeds[k] = v
        k += 1

    return DriveCycle(times=times, speeds=speeds,
                      name=f"synth-seed{seed}-{int(duration)}s")
