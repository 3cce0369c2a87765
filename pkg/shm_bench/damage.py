"""Fast stiffness-step schedules and slow corrosion depth evolution on the hourly grid."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .environment import CorrosionDrivers, EnvSeries, yearly_drivers
from .models import HOURS_PER_YEAR, BenchmarkError, DamageSpec, FastStep, SlowDamageSpec, TimeGrid

logger = logging.getLogger(__name__)

DAMAGE_ONSET_INDEX = 13104

FAST_VARIANTS = ("2.1", "2.2", "2.3")
SLOW_LEVEL_MULTIPLIERS = {0: 1.0, 1: 10.0, 3: 20.0}

_MONTHLY_STEPS = 18
_GEOMETRIC_RATES = (0.01, 0.02, 0.04, 0.08, 0.16, 0.32)
_GEOMETRIC_SPACING_MONTHS = 3


class DamageScheduleError(BenchmarkError, ValueError):
    """Raised for unknown variants or levels and infeasible schedules."""


@dataclass(frozen=True)
class DamageSeries:
    """Per-hour fast decay rate and corrosion depth (mm)."""

    r_fast: np.ndarray
    d_slow: np.ndarray

    def __post_init__(self) -> None:
        self.r_fast.flags.writeable = False
        self.d_slow.flags.writeable = False


def _month_onsets(grid: TimeGrid, onset_index: int) -> np.ndarray:
    later = grid.month_start_indices(onset_index + 1)
    return np.concatenate(([onset_index], later))


def fast_steps(variant: str, grid: TimeGrid, onset_index: int = DAMAGE_ONSET_INDEX) -> Tuple[FastStep, ...]:
    """Step list of a fast-damage variant.

    ``2.1`` is a single 10 % drop. ``2.2`` adds 1 % at each of 18 month
    starts. ``2.3`` doubles from 1 % to 32 % every three months.

    Raises:
        DamageScheduleError: If the variant is unknown or the grid is too short.
    """
    grid.check_index(onset_index)
    if variant == "2.1":
        return (FastStep(onset_index=onset_index, rate=0.10),)

    onsets = _month_onsets(grid, onset_index)
    if variant == "2.2":
        rates = [0.01 * (k + 1) for k in range(_MONTHLY_STEPS)]
        chosen = onsets[:_MONTHLY_STEPS]
    elif variant == "2.3":
        rates = list(_GEOMETRIC_RATES)
        chosen = onsets[::_GEOMETRIC_SPACING_MONTHS][: len(rates)]
    else:
        raise DamageScheduleError(f"Unknown fast damage variant: {variant}")

    if len(chosen) < len(rates):
        raise DamageScheduleError(f"Grid too short for variant {variant}: {len(chosen)} of {len(rates)} onsets")
    return tuple(FastStep(onset_index=int(i), rate=round(r, 10)) for i, r in zip(chosen, rates))


def step_series(steps: Sequence[FastStep], n: int) -> np.ndarray:
    """Right-continuous step function of cumulative rates."""
    r = np.zeros(n)
    for step in steps:
        r[step.onset_index:] = step.rate
    return r


def fast_schedule(variant: str, grid: TimeGrid, onset_index: int = DAMAGE_ONSET_INDEX) -> np.ndarray:
    return step_series(fast_steps(variant, grid, onset_index), grid.n_acquisitions)


def _dose_response(spec: SlowDamageSpec, drivers: CorrosionDrivers) -> float:
    tow = spec.tow_hours if spec.tow_hours is not None else drivers.tow_hours
    return (
        (tow / spec.c) ** spec.d
        * (1 + drivers.so2 / spec.e) ** spec.f
        * (1 + drivers.chloride / spec.g) ** spec.h
        * np.exp(spec.j * (drivers.mean_temperature + spec.t0))
    )


def calibrate_corrosion_coefficient(spec: SlowDamageSpec, drivers: CorrosionDrivers,
                                    target_um_per_year: Optional[float] = None) -> float:
    """Scale coefficient A that gives ``target_um_per_year`` after one year.

    Raises:
        DamageScheduleError: If the environment never wets the steel.
    """
    target = spec.reference_rate_um if target_um_per_year is None else target_um_per_year
    response = _dose_response(spec, drivers)
    if response <= 0:
        raise DamageScheduleError("Corrosion drivers give zero response (time of wetness is 0)")
    return float(target / response)


def corrosion_depth(t_exposure, spec: SlowDamageSpec, drivers: CorrosionDrivers,
                    reference: Optional[CorrosionDrivers] = None):
    """Corrosion depth (μm) after ``t_exposure`` years, scaled by the rate multiplier.

    Args:
        t_exposure: Exposure time in years (scalar or array).
        spec: Dose-response coefficients.
        drivers: Yearly environment aggregates.
        reference: Drivers used to calibrate A when ``spec.a`` is unset; defaults to ``drivers``.

    Raises:
        DamageScheduleError: If any exposure time is negative.
    """
    t = np.asarray(t_exposure, dtype=float)
    if np.any(t < 0):
        raise DamageScheduleError("Exposure time must be non-negative")
    a = spec.a if spec.a is not None else calibrate_corrosion_coefficient(spec, reference or drivers)
    depth = spec.rate_multiplier * a * t**spec.b * _dose_response(spec, drivers)
    return depth if depth.ndim else float(depth)


def slow_series(spec: SlowDamageSpec, grid: TimeGrid, env: EnvSeries) -> np.ndarray:
    """Hourly corrosion depth in mm, zero before the exposure start.

    The dose-response curve gives the shape of the series. When
    ``spec.end_depth_mm`` is set, the curve is rescaled so the last
    acquisition reaches ``rate_multiplier * end_depth_mm``; otherwise the
    calibrated rate is used as is.
    """
    year = spec.calibration_year or grid.start_date.year
    drivers = yearly_drivers(env, grid, year, spec.so2, spec.chloride)
    hours = np.arange(grid.n_acquisitions) - spec.exposure_start_index
    t_years = np.maximum(hours, 0) / HOURS_PER_YEAR
    depth_mm = np.asarray(corrosion_depth(t_years, spec, drivers), dtype=float) / 1000.0
    calibrated_end = float(depth_mm[-1])

    if spec.end_depth_mm is not None and calibrated_end > 0:
        depth_mm = depth_mm * (spec.rate_multiplier * spec.end_depth_mm / calibrated_end)

    one_year = corrosion_depth(1.0, spec, drivers) / 1000.0
    logger.info(
        "Corrosion at x%g: %.4f mm at end of monitoring (calibrated curve %.4f mm; %.4f mm/yr, "
        "%.4f mm over the full monitoring period)",
        spec.rate_multiplier, depth_mm[-1], calibrated_end, one_year, one_year * grid.n_years,
    )
    return depth_mm


def slow_schedule(level: int, grid: TimeGrid, env: EnvSeries, spec: Optional[SlowDamageSpec] = None) -> np.ndarray:
    """Corrosion depth series for level 0 (x1), 1 (x10) or 3 (x20).

    Raises:
        DamageScheduleError: If the level is unknown.
    """
    if level not in SLOW_LEVEL_MULTIPLIERS:
        raise DamageScheduleError(f"Unknown corrosion level: {level}")
    base = spec or SlowDamageSpec()
    return slow_series(base.model_copy(update={"rate_multiplier": SLOW_LEVEL_MULTIPLIERS[level]}), grid, env)


def slow_spec(level: int, onset_index: int = DAMAGE_ONSET_INDEX) -> SlowDamageSpec:
    if level not in SLOW_LEVEL_MULTIPLIERS:
        raise DamageScheduleError(f"Unknown corrosion level: {level}")
    return SlowDamageSpec(rate_multiplier=SLOW_LEVEL_MULTIPLIERS[level], exposure_start_index=onset_index)


def damage_series(spec: DamageSpec, grid: TimeGrid, env: EnvSeries) -> DamageSeries:
    """Realize both damage components of a spec on the grid."""
    n = grid.n_acquisitions
    for step in spec.fast:
        grid.check_index(step.onset_index)
    r_fast = step_series(spec.fast, n)
    d_slow = slow_series(spec.slow, grid, env) if spec.slow is not None else np.zeros(n)
    return DamageSeries(r_fast=r_fast, d_slow=d_slow)
