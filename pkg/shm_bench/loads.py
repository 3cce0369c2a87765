"""Probabilistic live load: sustained square-wave plus intermittent spike processes."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .models import HOURS_PER_YEAR, BeamModel, BenchmarkError, LiveLoadParams, TimeGrid
from .seeding import INTERMITTENT_LOAD, SUSTAINED_LOAD, rng_for
from .structure import dead_loads, midspan_deflection, section_properties

logger = logging.getLogger(__name__)


class LoadError(BenchmarkError, ValueError):
    """Raised for invalid load process inputs."""


@dataclass(frozen=True)
class IntermittentEvent:
    start_index: int
    stop_index: int
    intensity: float


@dataclass(frozen=True)
class SustainedLoad:
    """Hourly sustained intensity (kN/m²) with its renewal instants."""

    values: np.ndarray
    renewal_indices: Tuple[int, ...]
    intensities: Tuple[float, ...]


@dataclass(frozen=True)
class IntermittentLoad:
    """Hourly intermittent intensity (kN/m²); overlapping events add up."""

    values: np.ndarray
    events: Tuple[IntermittentEvent, ...] = field(default=())


@dataclass(frozen=True)
class LoadProcess:
    """Line loads in kN/m on the hourly grid."""

    p_q_lt: np.ndarray
    p_q_st: np.ndarray
    p_g: float
    p_des: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.p_q_lt, self.p_q_st, self.p_des):
            arr.flags.writeable = False

    @property
    def p_q(self) -> np.ndarray:
        return self.p_q_lt + self.p_q_st

    def __len__(self) -> int:
        return len(self.p_des)


@dataclass(frozen=True)
class LoadEnvelope:
    """Extreme and average values of a realized load history."""

    p_q_lt_max: float
    p_q_lt_min: float
    p_q_st_max: float
    p_q_max: float
    p_q_min: float
    p_q_avg: float
    p_des_max: float
    p_des_avg: float
    ratio_max: float
    ratio_min: float
    p_uls_max: float
    p_uls_avg: float
    delta_q_max: float
    within_ratio_band: bool


def sustained_std(params: LiveLoadParams) -> float:
    """σ_lt = sqrt(σ_v² + σ_u² κ A0/A), unless overridden."""
    if params.sigma_lt_override is not None:
        return params.sigma_lt_override
    return math.sqrt(params.sigma_v**2 + params.sigma_u**2 * params.kappa * params.a0 / params.area)


def intermittent_std(params: LiveLoadParams) -> float:
    """σ_st = sqrt(σ_U² κ A0/A), unless overridden."""
    if params.sigma_st_override is not None:
        return params.sigma_st_override
    return math.sqrt(params.sigma_big_u**2 * params.kappa * params.a0 / params.area)


def gamma_shape_rate(mean: float, std: float) -> Tuple[float, float]:
    """Gamma (shape α, rate β) with the given mean and standard deviation.

    Raises:
        LoadError: If mean or std is not positive.
    """
    if mean <= 0 or std <= 0:
        raise LoadError(f"Gamma moments must be positive, got mean={mean}, std={std}")
    variance = std**2
    return mean**2 / variance, mean / variance


def _intensity_sampler(rng: np.random.Generator, mean: float, std: float):
    if std == 0:
        return lambda: mean
    alpha, beta = gamma_shape_rate(mean, std)
    return lambda: float(rng.gamma(alpha, 1.0 / beta))


def _exponential_hours(rng: np.random.Generator, mean_years: float) -> float:
    if not math.isfinite(mean_years):
        return math.inf
    return float(rng.exponential(mean_years * HOURS_PER_YEAR))


def realize_sustained(grid: TimeGrid, params: LiveLoadParams, seed=None) -> SustainedLoad:
    """Poisson square wave: exponential renewal times, Gamma intensities held in between."""
    rng = np.random.default_rng(seed)
    draw = _intensity_sampler(rng, params.m_lt, sustained_std(params))
    n = grid.n_acquisitions
    values = np.empty(n)
    renewals: List[int] = []
    intensities: List[float] = []

    start, t = 0, 0.0
    while True:
        intensity = draw()
        t += _exponential_hours(rng, params.inv_lambda)
        stop = n if t >= n else int(math.ceil(t))
        if stop > start:
            values[start:stop] = intensity
            renewals.append(start)
            intensities.append(intensity)
            start = stop
        if stop >= n:
            break

    return SustainedLoad(values=values, renewal_indices=tuple(renewals), intensities=tuple(intensities))


def realize_intermittent(grid: TimeGrid, params: LiveLoadParams, seed=None) -> IntermittentLoad:
    """Poisson spikes: exponential inter-arrivals, each event held for ``d_p`` days."""
    rng = np.random.default_rng(seed)
    draw = _intensity_sampler(rng, params.m_st, intermittent_std(params))
    n = grid.n_acquisitions
    duration = int(round(params.d_p_days * 24))
    values = np.zeros(n)
    events: List[IntermittentEvent] = []

    t = _exponential_hours(rng, params.inv_nu)
    while t < n:
        start = int(t)
        stop = min(n, start + duration)
        intensity = draw()
        values[start:stop] += intensity
        events.append(IntermittentEvent(start_index=start, stop_index=stop, intensity=intensity))
        t += _exponential_hours(rng, params.inv_nu)

    return IntermittentLoad(values=values, events=tuple(events))


def combine_sls(p_g: float, lt_series: np.ndarray, st_series: np.ndarray) -> LoadProcess:
    """p_des = 1.0 p_G + 1.0 (p_Q,lt + p_Q,st), all in kN/m.

    Raises:
        LoadError: If the series lengths differ.
    """
    lt = np.asarray(lt_series, dtype=float)
    st = np.asarray(st_series, dtype=float)
    if lt.shape != st.shape:
        raise LoadError(f"Load series lengths differ: {lt.shape} vs {st.shape}")
    return LoadProcess(p_q_lt=lt.copy(), p_q_st=st.copy(), p_g=float(p_g), p_des=p_g + lt + st)


def uls_design_load(p_g1, p_g2, p_q, params: LiveLoadParams):
    return params.gamma_g1 * p_g1 + params.gamma_g2 * p_g2 + params.gamma_q * np.asarray(p_q, dtype=float)


def realize_load_process(grid: TimeGrid, params: LiveLoadParams, beam: BeamModel, master_seed: int) -> LoadProcess:
    """Sustained and intermittent processes converted to line loads and combined with the dead load."""
    width = beam.tributary_width_m
    sustained = realize_sustained(grid, params, rng_for(master_seed, SUSTAINED_LOAD))
    intermittent = realize_intermittent(grid, params, rng_for(master_seed, INTERMITTENT_LOAD))
    logger.debug(
        "Live load realized: %d sustained renewals, %d intermittent events",
        len(sustained.renewal_indices), len(intermittent.events),
    )
    return combine_sls(dead_loads(beam).total, sustained.values * width, intermittent.values * width)


def load_envelope(load: LoadProcess, params: LiveLoadParams, beam: BeamModel) -> LoadEnvelope:
    """Extremes of a realized history; logs when p_Q/p_G leaves the expected band."""
    dead = dead_loads(beam)
    p_q = load.p_q
    ratio = p_q / load.p_g
    p_uls = uls_design_load(dead.structural, dead.non_structural, p_q, params)
    inertia = section_properties(beam.section).inertia
    band_low, band_high = params.ratio_band
    within = bool(ratio.min() >= band_low * 0.9 and ratio.max() <= band_high * 1.1)
    if not within:
        logger.warning(
            "Live/dead load ratio %.2f%%-%.2f%% leaves the expected band %.2f%%-%.2f%%",
            100 * ratio.min(), 100 * ratio.max(), 100 * band_low, 100 * band_high,
        )
    return LoadEnvelope(
        p_q_lt_max=float(load.p_q_lt.max()),
        p_q_lt_min=float(load.p_q_lt.min()),
        p_q_st_max=float(load.p_q_st.max()),
        p_q_max=float(p_q.max()),
        p_q_min=float(p_q.min()),
        p_q_avg=float(p_q.mean()),
        p_des_max=float(load.p_des.max()),
        p_des_avg=float(load.p_des.mean()),
        ratio_max=float(ratio.max()),
        ratio_min=float(ratio.min()),
        p_uls_max=float(p_uls.max()),
        p_uls_avg=float(p_uls.mean()),
        delta_q_max=float(midspan_deflection(p_q.max(), beam.e0_mpa, inertia, beam.length_mm, beam.boundary_factor)),
        within_ratio_band=within,
    )
