"""Hourly grid construction, realized scenario state and per-acquisition covariates."""

import logging
from dataclasses import dataclass
from datetime import date
from functools import lru_cache
from typing import Mapping, Optional, Union

from pydantic import ValidationError

from .damage import DamageSeries, damage_series
from .dynamics import ambient_sigmas
from .environment import EnvSeries, synth_environment
from .loads import LoadProcess, load_envelope, realize_load_process
from .models import CovariateRecord, GridError, ScenarioConfig, TimeGrid
from .seeding import AMBIENT_SIGMA, TEMPERATURE, acquisition_seed, rng_for
from .structure import limit_state_summary

logger = logging.getLogger(__name__)

__all__ = [
    "GridError",
    "RealizedScenario",
    "acquisition_seed",
    "build_time_grid",
    "covariates_for",
    "realize_scenario",
]


def build_time_grid(start: date, n_years: int) -> TimeGrid:
    """Hourly grid from ``start`` over ``n_years`` years without Feb 29.

    Raises:
        GridError: If ``n_years`` is not positive or the start date is invalid.
    """
    if n_years <= 0:
        raise GridError(f"n_years must be at least 1, got {n_years}")
    try:
        return TimeGrid(start_date=start, n_years=n_years)
    except ValidationError as e:
        raise GridError(str(e)) from e


@dataclass(frozen=True)
class RealizedScenario:
    """Environment, load and damage series of one scenario."""

    config: ScenarioConfig
    env: EnvSeries
    load: LoadProcess
    damage: DamageSeries

    @property
    def grid(self) -> TimeGrid:
        return self.config.grid


def _static_checks(config: ScenarioConfig, load: LoadProcess) -> None:
    params = config.load_params
    envelope = load_envelope(load, params, config.beam)
    summary = limit_state_summary(config.beam, envelope.p_q_max, params.gamma_g1, params.gamma_g2, params.gamma_q)
    logger.info(
        "Static checks: M_A,ULS %.2f kN·m against M_R,el %.2f kN·m; dead-load deflection %.2f mm (limit %.2f mm)",
        summary.m_a_uls, summary.m_r_el, summary.delta_g, summary.delta_lim,
    )


@lru_cache(maxsize=8)
def _realize(payload: str) -> RealizedScenario:
    config = ScenarioConfig.model_validate_json(payload)
    grid = config.grid
    logger.info("Realizing scenario over %d acquisitions (seed %d)", grid.n_acquisitions, config.master_seed)
    env = synth_environment(grid, config.env_params, rng_for(config.master_seed, TEMPERATURE))
    load = realize_load_process(grid, config.load_params, config.beam, config.master_seed)
    _static_checks(config, load)
    damage = damage_series(config.damage_spec, grid, env)
    return RealizedScenario(config=config, env=env, load=load, damage=damage)


def realize_scenario(scenario: ScenarioConfig) -> RealizedScenario:
    """Realize (or fetch from the per-process cache) every upstream series of a scenario."""
    payload = scenario.model_copy(update={"n_workers": 1, "fault_policy": None}).model_dump_json()
    realized = _realize(payload)
    if realized.config != scenario:
        realized = RealizedScenario(config=scenario, env=realized.env, load=realized.load, damage=realized.damage)
    return realized


def covariates_for(i: int, scenario: Union[ScenarioConfig, RealizedScenario],
                   faults: Optional[Mapping[int, object]] = None) -> CovariateRecord:
    """Covariate vector of acquisition ``i``.

    Args:
        i: Grid index.
        scenario: Scenario configuration or its realization.
        faults: Optional contamination plan; entries expose ``fault_class``.

    Raises:
        GridError: If ``i`` is outside the grid.
    """
    realized = scenario if isinstance(scenario, RealizedScenario) else realize_scenario(scenario)
    config = realized.config
    config.grid.check_index(i)
    entry = faults.get(i) if faults else None
    return CovariateRecord(
        index=i,
        timestamp=config.grid.timestamp_at(i),
        temperature=float(realized.env.temperature[i]),
        p_des=float(realized.load.p_des[i]),
        sigma_av=ambient_sigmas(config.excitation, rng_for(config.master_seed, AMBIENT_SIGMA, i)),
        d_fast=float(realized.damage.r_fast[i]),
        d_slow=float(realized.damage.d_slow[i]),
        sfm=getattr(entry, "fault_class", None),
        epsilon_flag=config.measurement_noise,
    )
