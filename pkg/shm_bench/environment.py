"""Hourly temperature and humidity, the temperature-dependent Young's modulus and corrosion drivers."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .models import (
    BenchmarkError,
    EnvParams,
    SyntheticTemperatureParams,
    TemperatureSource,
    TimeGrid,
)

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]

WET_HUMIDITY = 80.0
CSV_HEADER = ("timestamp", "T_degC", "RH_pct")


class EnvironmentDomainError(BenchmarkError, ValueError):
    """Raised for temperatures outside the validity window or malformed environment data."""


@dataclass(frozen=True)
class EnvSeries:
    """Hourly temperature (°C) and relative humidity (%) on the grid."""

    temperature: np.ndarray
    humidity: np.ndarray
    provenance: TemperatureSource

    def __post_init__(self) -> None:
        if self.temperature.shape != self.humidity.shape:
            raise EnvironmentDomainError("Temperature and humidity lengths differ")
        if np.any(self.humidity < 0) or np.any(self.humidity > 100):
            raise EnvironmentDomainError("Relative humidity outside [0, 100] %")
        self.temperature.flags.writeable = False
        self.humidity.flags.writeable = False

    def __len__(self) -> int:
        return len(self.temperature)


@dataclass(frozen=True)
class CorrosionDrivers:
    """Yearly aggregates entering the dose-response corrosion law."""

    tow_hours: float
    mean_temperature: float
    so2: float
    chloride: float


def _ar1(rng: np.random.Generator, n: int, phi: float, std: float) -> np.ndarray:
    if std == 0:
        return np.zeros(n)
    return lfilter([1.0], [1.0, -phi], std * rng.standard_normal(n))


def synth_temperature(grid: TimeGrid, params: SyntheticTemperatureParams, seed: SeedLike = None) -> EnvSeries:
    """Synthesize hourly temperature and anticorrelated humidity.

    T = mean + seasonal sine + diurnal sine + AR(1) residual. Humidity falls
    when temperature rises above the mean and carries its own AR(1) residual.

    Args:
        grid: Hourly grid.
        params: Synthetic climate parameters.
        seed: Anything ``numpy.random.default_rng`` accepts.

    Returns:
        EnvSeries with synthetic provenance.
    """
    rng = np.random.default_rng(seed)
    n = grid.n_acquisitions
    day = grid.day_of_year().astype(float)
    hour = grid.hour_of_day().astype(float)

    temperature = (
        params.annual_mean
        + params.seasonal_amplitude * np.sin(2 * np.pi * day / 365.0 + params.seasonal_phase)
        + params.diurnal_amplitude * np.sin(2 * np.pi * hour / 24.0 + params.diurnal_phase)
        + _ar1(rng, n, params.ar_coefficient, params.noise_std)
    )
    humidity = synth_humidity(temperature, params, rng)
    return EnvSeries(temperature=temperature, humidity=humidity, provenance=TemperatureSource.SYNTHETIC)


def synth_humidity(temperature: np.ndarray, params: SyntheticTemperatureParams, rng: np.random.Generator) -> np.ndarray:
    residual = _ar1(rng, len(temperature), params.ar_coefficient, params.rh_noise_std)
    humidity = params.rh_base - params.rh_coupling * (temperature - params.annual_mean) + residual
    return np.clip(humidity, 0.0, 100.0)


def load_environment_csv(path: Path, grid: TimeGrid) -> EnvSeries:
    """Read an external ``timestamp,T_degC,RH_pct`` file aligned to the grid.

    Raises:
        EnvironmentDomainError: If the header, row count or timestamps do not match.
    """
    with open(path, "r", encoding="utf-8") as f:
        header = tuple(part.strip() for part in f.readline().split(","))
    if header != CSV_HEADER:
        raise EnvironmentDomainError(f"Expected header {','.join(CSV_HEADER)}, got {','.join(header)}")

    table = np.genfromtxt(
        path, delimiter=",", skip_header=1, dtype=None, encoding="utf-8",
        names=("timestamp", "temperature", "humidity"),
    )
    table = np.atleast_1d(table)
    if len(table) != grid.n_acquisitions:
        raise EnvironmentDomainError(f"{path} has {len(table)} rows, grid needs {grid.n_acquisitions}")

    stamps = np.array(table["timestamp"], dtype="datetime64[h]")
    if not np.array_equal(stamps, grid.timestamps()):
        raise EnvironmentDomainError(f"{path} timestamps do not match the hourly grid")

    return EnvSeries(
        temperature=np.asarray(table["temperature"], dtype=float),
        humidity=np.asarray(table["humidity"], dtype=float),
        provenance=TemperatureSource.EXTERNAL_FILE,
    )


def synth_environment(grid: TimeGrid, params: EnvParams, seed: SeedLike = None) -> EnvSeries:
    """Environment series from the configured source."""
    if params.temp_source is TemperatureSource.EXTERNAL_FILE:
        logger.info("Reading environment from %s", params.temp_file)
        return load_environment_csv(params.temp_file, grid)
    return synth_temperature(grid, params.synth, seed)


def youngs_modulus(temperature, params: EnvParams):
    """Young's modulus (MPa) at temperature ``temperature`` (°C, scalar or array).

    E = E0 (1 - α_T T) exp(-½ (T⁺/e3)^e1 - ½ (T⁺/e4)^e2), with T⁺ = max(T, 0)
    so the power terms stay real below freezing.

    Raises:
        EnvironmentDomainError: If any temperature is outside the validity window.
    """
    t = np.asarray(temperature, dtype=float)
    low, high = params.validity_window
    if np.any(t < low) or np.any(t > high) or not np.all(np.isfinite(t)):
        raise EnvironmentDomainError(f"Temperature outside validity window [{low}, {high}] °C")

    t_pos = np.maximum(t, 0.0)
    decay = np.exp(-0.5 * (t_pos / params.e3) ** params.e1 - 0.5 * (t_pos / params.e4) ** params.e2)
    modulus = params.e0_mpa * (1.0 - params.alpha_t * t) * decay
    return modulus if modulus.ndim else float(modulus)


def time_of_wetness(env: EnvSeries, grid: TimeGrid, year: int) -> float:
    """Hours of ``year`` with RH > 80 % and T > 0 °C.

    Raises:
        EnvironmentDomainError: If the grid does not cover the whole year.
    """
    span = grid.year_slice(year)
    if span.stop - span.start != 8760:
        raise EnvironmentDomainError(f"Year {year} is incomplete on the grid")
    wet = (env.humidity[span] > WET_HUMIDITY) & (env.temperature[span] > 0.0)
    return float(np.count_nonzero(wet))


def yearly_drivers(env: EnvSeries, grid: TimeGrid, year: int, so2: float, chloride: float) -> CorrosionDrivers:
    span = grid.year_slice(year)
    drivers = CorrosionDrivers(
        tow_hours=time_of_wetness(env, grid, year),
        mean_temperature=float(np.mean(env.temperature[span])),
        so2=so2,
        chloride=chloride,
    )
    logger.debug("Corrosion drivers for %d: %s", year, drivers)
    return drivers
