"""Tests for the environment series and the Young's modulus law."""

import numpy as np
import pytest
from pathlib import Path
from tempfile import TemporaryDirectory

from shm_bench.environment import (
    EnvSeries,
    EnvironmentDomainError,
    load_environment_csv,
    synth_environment,
    synth_temperature,
    time_of_wetness,
    yearly_drivers,
    youngs_modulus,
)
from shm_bench.models import EnvParams, SyntheticTemperatureParams, TemperatureSource, TimeGrid


@pytest.fixture(scope="module")
def one_year():
    return TimeGrid(n_years=1)


class TestSyntheticTemperature:
    """Seasonal, diurnal and AR(1) synthesis."""

    def test_length_and_provenance(self, one_year):
        env = synth_temperature(one_year, SyntheticTemperatureParams(), seed=1)
        assert len(env) == 8760
        assert env.provenance is TemperatureSource.SYNTHETIC

    def test_deterministic_for_seed(self, one_year):
        a = synth_temperature(one_year, SyntheticTemperatureParams(), seed=5)
        b = synth_temperature(one_year, SyntheticTemperatureParams(), seed=5)
        c = synth_temperature(one_year, SyntheticTemperatureParams(), seed=6)
        np.testing.assert_array_equal(a.temperature, b.temperature)
        assert not np.array_equal(a.temperature, c.temperature)

    def test_annual_mean_and_season(self, one_year):
        env = synth_temperature(one_year, SyntheticTemperatureParams(), seed=2)
        assert env.temperature.mean() == pytest.approx(15.0, abs=1.5)
        january = env.temperature[:31 * 24].mean()
        july = env.temperature[one_year.year_slice(2020)][181 * 24:212 * 24].mean()
        assert july - january > 10.0

    def test_noise_free_series_is_periodic(self, one_year):
        params = SyntheticTemperatureParams(noise_std=0.0, rh_noise_std=0.0)
        env = synth_temperature(one_year, params, seed=0)
        assert env.temperature.max() <= 15.0 + 10.0 + 4.0 + 1e-9
        assert env.temperature.min() >= 15.0 - 10.0 - 4.0 - 1e-9

    def test_humidity_anticorrelated_and_bounded(self, one_year):
        env = synth_temperature(one_year, SyntheticTemperatureParams(), seed=3)
        assert env.humidity.min() >= 0.0
        assert env.humidity.max() <= 100.0
        assert np.corrcoef(env.temperature, env.humidity)[0, 1] < -0.5

    def test_series_are_read_only(self, one_year):
        env = synth_temperature(one_year, SyntheticTemperatureParams(), seed=3)
        with pytest.raises(ValueError):
            env.temperature[0] = 0.0

    def test_invalid_humidity_rejected(self):
        with pytest.raises(EnvironmentDomainError):
            EnvSeries(temperature=np.zeros(3), humidity=np.array([50.0, 120.0, 10.0]),
                      provenance=TemperatureSource.SYNTHETIC)


class TestExternalEnvironment:
    """CSV ingestion."""

    def _write(self, path: Path, grid: TimeGrid, header: str = "timestamp,T_degC,RH_pct") -> None:
        stamps = np.datetime_as_string(grid.timestamps(), unit="h")
        with open(path, "w") as f:
            f.write(header + "\n")
            for i, ts in enumerate(stamps):
                f.write(f"{ts},{10 + (i % 24) * 0.5},{60 + (i % 7)}\n")

    def test_load_csv(self, one_year):
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "env.csv"
            self._write(path, one_year)

            env = load_environment_csv(path, one_year)

            assert env.provenance is TemperatureSource.EXTERNAL_FILE
            assert env.temperature[1] == pytest.approx(10.5)
            assert env.humidity[6] == pytest.approx(66.0)

    def test_synth_environment_uses_file(self, one_year):
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "env.csv"
            self._write(path, one_year)
            params = EnvParams(temp_source=TemperatureSource.EXTERNAL_FILE, temp_file=path)

            env = synth_environment(one_year, params)
            assert env.provenance is TemperatureSource.EXTERNAL_FILE

    def test_bad_header(self, one_year):
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "env.csv"
            self._write(path, one_year, header="time,temp,rh")
            with pytest.raises(EnvironmentDomainError):
                load_environment_csv(path, one_year)

    def test_row_count_mismatch(self, one_year):
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "env.csv"
            self._write(path, one_year)
            with pytest.raises(EnvironmentDomainError):
                load_environment_csv(path, TimeGrid(n_years=2))


class TestYoungsModulus:
    """Temperature-dependent modulus."""

    def test_reference_value_at_zero(self):
        assert youngs_modulus(0.0, EnvParams()) == pytest.approx(210000.0)

    def test_scalar_in_scalar_out(self):
        assert isinstance(youngs_modulus(20.0, EnvParams()), float)

    def test_twenty_degrees(self):
        assert youngs_modulus(20.0, EnvParams()) == pytest.approx(210000.0 * 0.97, rel=1e-4)

    def test_forty_degrees(self):
        assert youngs_modulus(40.0, EnvParams()) == pytest.approx(197400.0, rel=1e-4)

    def test_monotone_decreasing(self):
        temperature = np.linspace(-20.0, 60.0, 161)
        modulus = youngs_modulus(temperature, EnvParams())
        assert np.all(np.diff(modulus) < 0)

    def test_outside_validity_window(self):
        with pytest.raises(EnvironmentDomainError):
            youngs_modulus(np.array([10.0, 150.0]), EnvParams())
        with pytest.raises(EnvironmentDomainError):
            youngs_modulus(float("nan"), EnvParams())


class TestCorrosionDrivers:
    """Time of wetness and yearly aggregates."""

    def test_time_of_wetness_counts_wet_warm_hours(self, one_year):
        temperature = np.full(8760, 5.0)
        temperature[:100] = -2.0
        humidity = np.full(8760, 50.0)
        humidity[:300] = 90.0
        env = EnvSeries(temperature=temperature, humidity=humidity, provenance=TemperatureSource.SYNTHETIC)

        assert time_of_wetness(env, one_year, 2020) == 200.0

    def test_yearly_drivers(self, one_year):
        env = synth_temperature(one_year, SyntheticTemperatureParams(), seed=4)
        drivers = yearly_drivers(env, one_year, 2020, so2=17.5, chloride=1.0)
        assert 0 <= drivers.tow_hours <= 8760
        assert drivers.mean_temperature == pytest.approx(env.temperature.mean())
        assert drivers.so2 == 17.5
