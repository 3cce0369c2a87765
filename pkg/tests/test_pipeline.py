"""Tests for the sub-dataset catalogue and the generation pipeline."""

import logging
import tempfile
from datetime import date
from pathlib import Path

import numpy as np
import pytest

from shm_bench.damage import DAMAGE_ONSET_INDEX
from shm_bench.models import FaultClass, FaultPolicy, ScenarioConfig, SubDatasetCode, TimeGrid
from shm_bench.pipeline import (
    D4_TARGET_COUNT,
    build_km_matrix,
    contaminate_directory,
    deflection_series,
    end_of_monitoring_check,
    fits_grid,
    generate_corpus,
    inspect_corpus,
    inspect_file,
    realized_for,
    run_generation,
    scenario_for,
    select_indices,
    subdataset_spec,
)
from shm_bench.scenario import build_time_grid
from shm_bench.storage import (
    CorpusError,
    load_manifest,
    read_acquisition,
    read_columns,
    read_fault_labels,
    write_acquisition,
)
from shm_bench.structure import MomentState


@pytest.fixture(scope="module")
def grid():
    return TimeGrid()


@pytest.fixture(scope="module")
def base():
    return ScenarioConfig(master_seed=123)


class TestCatalogue:
    """Windows, damage and counts of every sub-dataset."""

    def test_expected_counts(self, grid):
        assert subdataset_spec(SubDatasetCode.D1, grid).expected_count == 26280
        for code in ("D2.1", "D2.2", "D2.3", "D3.1", "D3.2", "D3.3", "D5"):
            spec = subdataset_spec(SubDatasetCode(code), grid)
            assert spec.start_index == DAMAGE_ONSET_INDEX
            assert spec.expected_count == 26280 - DAMAGE_ONSET_INDEX
        assert subdataset_spec(SubDatasetCode.D4, grid).expected_count == D4_TARGET_COUNT

    def test_fault_policies(self, grid):
        assert subdataset_spec(SubDatasetCode.D1, grid).fault_policy is None
        assert subdataset_spec(SubDatasetCode.D4, grid).fault_policy.fraction == 0.5
        d5 = subdataset_spec(SubDatasetCode.D5, grid)
        assert d5.fault_policy.fraction == 0.3
        assert d5.damage.fast and d5.damage.slow is not None

    def test_file_suffixes(self, grid):
        assert subdataset_spec(SubDatasetCode.D1, grid).file_suffix == "1"
        assert subdataset_spec(SubDatasetCode.D2_3, grid).file_suffix == "23"

    def test_scenario_for(self, base):
        scenario = scenario_for(SubDatasetCode.D3_2, base)
        assert scenario.damage_spec.slow.rate_multiplier == 10.0
        assert scenario.master_seed == base.master_seed
        assert scenario.fault_policy is None

    def test_select_indices(self, grid):
        d1 = subdataset_spec(SubDatasetCode.D1, grid)
        assert select_indices(d1, 1, range(10, 15)) == [10, 11, 12, 13, 14]
        d4 = subdataset_spec(SubDatasetCode.D4, grid)
        chosen = select_indices(d4, 1)
        assert len(chosen) == D4_TARGET_COUNT
        assert chosen == sorted(chosen)
        assert chosen[0] >= DAMAGE_ONSET_INDEX
        d2 = subdataset_spec(SubDatasetCode.D2_1, grid)
        assert select_indices(d2, 1, range(5)) == []


class TestSeries:
    """Stiffness, mass and deflection over the grid."""

    def test_km_matrix_undamaged(self, base):
        km = build_km_matrix(base)
        assert len(km) == 26280
        assert km.rows.shape == (26280, 2)
        assert np.all(km.k > 8.0e7) and np.all(km.k < 9.5e7)
        assert np.median(km.m) == pytest.approx(26740, rel=0.03)

    def test_temperature_frequency_variation_stays_within_budget(self, base):
        km = build_km_matrix(base)
        f_thermal = np.sqrt(km.k / km.k.mean())
        deviation = np.abs(f_thermal - 1.0).max()
        assert 0.005 < deviation < 0.05

    def test_fast_damage_lowers_stiffness(self, base):
        undamaged = build_km_matrix(realized_for(SubDatasetCode.D1, base))
        damaged = build_km_matrix(realized_for(SubDatasetCode.D2_1, base))
        np.testing.assert_allclose(damaged.k[:DAMAGE_ONSET_INDEX], undamaged.k[:DAMAGE_ONSET_INDEX])
        np.testing.assert_allclose(damaged.k[DAMAGE_ONSET_INDEX:], 0.9 * undamaged.k[DAMAGE_ONSET_INDEX:])

    def test_corrosion_lowers_stiffness_and_mass(self, base):
        undamaged = build_km_matrix(realized_for(SubDatasetCode.D1, base))
        corroded = build_km_matrix(realized_for(SubDatasetCode.D3_3, base))
        assert corroded.k[-1] < undamaged.k[-1]
        assert corroded.m[-1] < undamaged.m[-1]

    def test_deflection(self, base):
        undamaged = deflection_series(realized_for(SubDatasetCode.D1, base))
        damaged = deflection_series(realized_for(SubDatasetCode.D2_1, base))
        assert np.median(undamaged) == pytest.approx(1.99 + 1.04, rel=0.08)
        np.testing.assert_allclose(damaged[-10:], undamaged[-10:] / 0.9)


class TestRunGeneration:
    """Writing sub-datasets to disk."""

    def setup_method(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def teardown_method(self):
        self.temp_dir.cleanup()

    def test_small_run(self, base):
        ticks = []
        summary = run_generation(base, SubDatasetCode.D1, self.root, indices=range(3), progress=ticks.append)
        assert summary.realized_count == 3
        assert summary.expected_count == 26280
        assert ticks == [1, 1, 1]
        assert sorted(p.name for p in summary.directory.glob("*.h5")) == [
            "acc00000-1.h5", "acc00001-1.h5", "acc00002-1.h5",
        ]
        stored = read_acquisition(summary.directory / "acc00001-1.h5")
        assert stored.samples.shape == (18000,)
        assert stored.attrs["index"] == 1
        assert stored.attrs["units"] == "m/s^2"
        assert "sfm" not in stored.attrs
        assert (self.root / "labels" / "labels_D1.txt").exists()

    def test_worker_count_does_not_change_corpus(self, base):
        serial = run_generation(base, SubDatasetCode.D2_1, self.root / "serial", range(13104, 13108), n_workers=1)
        parallel = run_generation(base, SubDatasetCode.D2_1, self.root / "parallel", range(13104, 13108),
                                  n_workers=2)
        assert load_manifest(serial.directory).entries == load_manifest(parallel.directory).entries

    def test_restricted_d4_run(self, base):
        summary = run_generation(base, SubDatasetCode.D4, self.root, indices=range(13104, 13184))
        assert summary.realized_count == 80
        assert summary.expected_count == D4_TARGET_COUNT
        assert 0 < summary.contaminated_count <= 40
        rows = read_fault_labels(self.root / "labels" / "faults_D4.txt")
        assert len(rows) == summary.contaminated_count
        manifest = load_manifest(summary.directory)
        assert sum(1 for e in manifest.entries if e.fault_class) == summary.contaminated_count

    def test_generate_corpus_writes_inputs(self, base):
        summaries = generate_corpus(base, [SubDatasetCode.D1, SubDatasetCode.D2_1], self.root,
                                    indices=[0, 1, DAMAGE_ONSET_INDEX, DAMAGE_ONSET_INDEX + 1])
        assert [s.code for s in summaries] == [SubDatasetCode.D1, SubDatasetCode.D2_1]
        assert (self.root / "input" / "temperature.txt").exists()
        assert sorted(p.name for p in (self.root / "input").glob("km_*.txt")) == ["km_D1.txt", "km_D2.1.txt"]
        deflection = read_columns(self.root / "deflection_D1-5.txt")
        assert deflection.shape == (26280, 3)
        np.testing.assert_array_equal(deflection[:DAMAGE_ONSET_INDEX, 2], deflection[:DAMAGE_ONSET_INDEX, 1])
        assert deflection[-1, 2] == pytest.approx(deflection[-1, 1] / 0.9, rel=1e-4)

    def test_generate_corpus_on_short_grid(self, caplog):
        short = ScenarioConfig(grid=build_time_grid(date(2021, 1, 1), 1), master_seed=123)
        with caplog.at_level(logging.WARNING, logger="shm_bench.pipeline"):
            summaries = generate_corpus(short, [SubDatasetCode.D1, SubDatasetCode.D3_1], self.root,
                                        indices=range(2))
        assert [s.code for s in summaries] == [SubDatasetCode.D1]
        assert summaries[0].realized_count == 2
        assert "D3.1: skipped" in caplog.text
        assert not (self.root / "input" / "km_D3.1.txt").exists()
        assert read_columns(self.root / "deflection_D1-5.txt").shape == (8760, 2)

    def test_fits_grid(self):
        short = build_time_grid(date(2021, 1, 1), 1)
        assert fits_grid(SubDatasetCode.D1, short)
        assert not fits_grid(SubDatasetCode.D2_1, short)
        assert fits_grid(SubDatasetCode.D5, TimeGrid())

    def test_end_of_monitoring_state(self, base):
        corroded = run_generation(base, SubDatasetCode.D3_3, self.root, indices=[DAMAGE_ONSET_INDEX])
        assert corroded.end_state is MomentState.FAILED
        ageing = end_of_monitoring_check(realized_for(SubDatasetCode.D3_1, base))
        assert ageing.state is MomentState.ELASTIC
        assert run_generation(base, SubDatasetCode.D1, self.root, indices=[0]).end_state is None


class TestContaminateDirectory:
    """Contaminating a stored sub-dataset."""

    def setup_method(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.source = Path(self.temp_dir.name) / "D1"
        self.source.mkdir()
        rng = np.random.default_rng(0)
        for i in range(60):
            write_acquisition(self.source / f"acc{i:05d}-1.h5", 1e-3 * rng.standard_normal(18000),
                              {"index": i, "fs": 100.0, "accepted": True})

    def teardown_method(self):
        self.temp_dir.cleanup()

    def test_contaminate(self):
        out = Path(self.temp_dir.name) / "D4"
        policy = FaultPolicy(classes=(FaultClass.BIAS, FaultClass.SPIKES), fraction=0.5)
        summary = contaminate_directory(self.source, out, policy, master_seed=3)
        assert summary.processed_count == 60
        assert 0 < summary.contaminated_count <= 30
        assert len(list(out.glob("acc*-4.h5"))) == 60
        assert len(read_fault_labels(summary.labels_path)) == summary.contaminated_count
        assert inspect_corpus(out).problems == ()

    def test_deterministic(self):
        policy = FaultPolicy(classes=(FaultClass.GAIN,), fraction=0.5, target_count=40)
        a = contaminate_directory(self.source, Path(self.temp_dir.name) / "a", policy, master_seed=3)
        b = contaminate_directory(self.source, Path(self.temp_dir.name) / "b", policy, master_seed=3)
        assert a.processed_count == 40
        assert load_manifest(a.directory).entries == load_manifest(b.directory).entries

    def test_empty_source(self):
        empty = Path(self.temp_dir.name) / "empty"
        empty.mkdir()
        with pytest.raises(CorpusError):
            contaminate_directory(empty, empty / "out", FaultPolicy(), master_seed=1)


class TestInspect:
    """Re-analysis of stored files and directories."""

    def setup_method(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def teardown_method(self):
        self.temp_dir.cleanup()

    def test_inspect_generated_file(self, base):
        summary = run_generation(base, SubDatasetCode.D1, self.root, indices=[5])
        report = inspect_file(summary.directory / "acc00005-1.h5")
        assert report.index == 5
        assert report.n_samples == 18000
        assert report.missing_samples == 0
        assert report.fault_class is None
        if report.accepted:
            assert report.relative_error <= 0.011

    def test_inspect_corpus(self, base):
        summary = run_generation(base, SubDatasetCode.D1, self.root, indices=range(2))
        report = inspect_corpus(summary.directory)
        assert report.ok
        assert report.file_count == report.manifest_count == 2
        assert report.catalogue_count == 26280

        (summary.directory / "acc00001-1.h5").unlink()
        report = inspect_corpus(summary.directory)
        assert not report.ok
        assert "missing: acc00001-1.h5" in report.problems

    def test_misnamed_file(self):
        path = self.root / "signal.h5"
        write_acquisition(path, np.ones(10), {})
        with pytest.raises(CorpusError):
            inspect_file(path)
