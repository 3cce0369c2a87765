"""Tests for the live load processes."""

import logging
import math

import numpy as np
import pytest

from shm_bench.loads import (
    LoadError,
    combine_sls,
    gamma_shape_rate,
    intermittent_std,
    load_envelope,
    realize_intermittent,
    realize_load_process,
    realize_sustained,
    sustained_std,
    uls_design_load,
)
from shm_bench.models import BeamModel, LiveLoadParams, TimeGrid
from shm_bench.structure import dead_loads


@pytest.fixture(scope="module")
def grid():
    return TimeGrid()


class TestMoments:
    """Standard deviations and Gamma parameters."""

    def test_formula_standard_deviations(self):
        params = LiveLoadParams(sigma_lt_override=None, sigma_st_override=None)
        assert sustained_std(params) == pytest.approx(0.2872, abs=1e-4)
        assert intermittent_std(params) == pytest.approx(0.3266, abs=1e-4)

    def test_overrides(self):
        params = LiveLoadParams()
        assert sustained_std(params) == 0.07
        assert intermittent_std(params) == 0.03

    def test_gamma_shape_rate(self):
        alpha, beta = gamma_shape_rate(3.0, 0.07)
        assert alpha == pytest.approx(1836.7, rel=1e-4)
        assert beta == pytest.approx(612.2, rel=1e-4)
        assert alpha / beta == pytest.approx(3.0)

    def test_gamma_rejects_non_positive(self):
        with pytest.raises(LoadError):
            gamma_shape_rate(0.0, 1.0)
        with pytest.raises(LoadError):
            gamma_shape_rate(1.0, 0.0)


class TestSustainedLoad:
    """Poisson square wave."""

    def test_piecewise_constant(self, grid):
        load = realize_sustained(grid, LiveLoadParams(inv_lambda=0.5), seed=1)
        assert len(load.values) == grid.n_acquisitions
        assert load.renewal_indices[0] == 0
        for start, intensity in zip(load.renewal_indices, load.intensities):
            assert load.values[start] == intensity
        changes = np.flatnonzero(np.diff(load.values)) + 1
        assert set(changes) <= set(load.renewal_indices)

    def test_infinite_renewal_time_holds_first_intensity(self, grid):
        load = realize_sustained(grid, LiveLoadParams(inv_lambda=math.inf), seed=2)
        assert load.renewal_indices == (0,)
        assert np.all(load.values == load.intensities[0])

    def test_deterministic_for_seed(self, grid):
        a = realize_sustained(grid, LiveLoadParams(), seed=9)
        b = realize_sustained(grid, LiveLoadParams(), seed=9)
        np.testing.assert_array_equal(a.values, b.values)


class TestIntermittentLoad:
    """Poisson spikes of fixed duration."""

    def test_events_last_five_days(self, grid):
        load = realize_intermittent(grid, LiveLoadParams(), seed=3)
        assert load.events
        for event in load.events:
            if event.stop_index < grid.n_acquisitions:
                assert event.stop_index - event.start_index == 120

    def test_zero_between_events(self, grid):
        load = realize_intermittent(grid, LiveLoadParams(inv_nu=2.0), seed=4)
        covered = np.zeros(grid.n_acquisitions, dtype=bool)
        for event in load.events:
            covered[event.start_index:event.stop_index] = True
        assert np.all(load.values[~covered] == 0.0)
        assert np.all(load.values[covered] > 0.0)

    def test_expected_event_count(self, grid):
        counts = [len(realize_intermittent(grid, LiveLoadParams(), seed=s).events) for s in range(200)]
        assert np.mean(counts) == pytest.approx(15.0, rel=0.05)

    def test_infinite_interarrival_means_no_events(self, grid):
        load = realize_intermittent(grid, LiveLoadParams(inv_nu=math.inf), seed=5)
        assert load.events == ()
        assert not load.values.any()

    def test_zero_spread_gives_constant_intensity(self, grid):
        params = LiveLoadParams(kappa=0.0, sigma_st_override=None)
        load = realize_intermittent(grid, params, seed=6)
        assert {event.intensity for event in load.events} == {0.3}


class TestLoadProcess:
    """Combinations and the full chain."""

    def test_combine_sls(self):
        load = combine_sls(28.72, np.full(4, 15.0), np.array([0.0, 1.5, 1.5, 0.0]))
        np.testing.assert_allclose(load.p_des, [43.72, 45.22, 45.22, 43.72])
        np.testing.assert_allclose(load.p_q, [15.0, 16.5, 16.5, 15.0])

    def test_combine_sls_length_mismatch(self):
        with pytest.raises(LoadError):
            combine_sls(28.72, np.zeros(3), np.zeros(4))

    def test_uls_combination(self):
        beam = BeamModel()
        dead = dead_loads(beam)
        params = LiveLoadParams()
        assert uls_design_load(dead.structural, dead.non_structural, 15.0, params) == pytest.approx(61.04, rel=0.005)
        assert uls_design_load(dead.structural, dead.non_structural, 19.11, params) == pytest.approx(67.20, rel=0.005)

    def test_long_run_mean(self, grid):
        beam = BeamModel()
        means = [realize_load_process(grid, LiveLoadParams(), beam, seed).p_q.mean() for seed in range(50)]
        assert np.mean(means) == pytest.approx(15.0, rel=0.02)

    def test_realized_process_is_read_only(self, grid):
        load = realize_load_process(grid, LiveLoadParams(), BeamModel(), 1)
        assert len(load) == grid.n_acquisitions
        assert load.p_g == pytest.approx(28.72, rel=0.005)
        with pytest.raises(ValueError):
            load.p_des[0] = 0.0

    def test_same_seed_same_process(self, grid):
        a = realize_load_process(grid, LiveLoadParams(), BeamModel(), 7)
        b = realize_load_process(grid, LiveLoadParams(), BeamModel(), 7)
        np.testing.assert_array_equal(a.p_des, b.p_des)


class TestLoadEnvelope:
    """Extreme values and the ratio-band check."""

    def test_envelope_inside_band(self):
        beam = BeamModel()
        load = combine_sls(dead_loads(beam).total, np.full(10, 15.0), np.zeros(10))
        envelope = load_envelope(load, LiveLoadParams(), beam)
        assert envelope.within_ratio_band
        assert envelope.p_q_avg == pytest.approx(15.0)
        assert envelope.p_uls_max == pytest.approx(61.04, rel=0.005)
        assert envelope.delta_q_max == pytest.approx(1.04, rel=0.005)

    def test_envelope_outside_band_warns(self, caplog):
        beam = BeamModel()
        load = combine_sls(dead_loads(beam).total, np.full(10, 40.0), np.zeros(10))
        with caplog.at_level(logging.WARNING, logger="shm_bench.loads"):
            envelope = load_envelope(load, LiveLoadParams(), beam)
        assert not envelope.within_ratio_band
        assert "ratio" in caplog.text
