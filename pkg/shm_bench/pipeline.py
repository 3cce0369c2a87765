"""Sub-dataset catalogue and the parallel generation pipeline."""

import logging
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .damage import DAMAGE_ONSET_INDEX, DamageSeries, damage_series, fast_steps, slow_spec
from .dynamics import SimulationError, generate_acquisition, welch_dominant_frequency
from .environment import youngs_modulus
from .faults import FaultAssignment, apply_fault, fault_label, plan_contamination, sample_targets
from .models import (
    DamageSpec,
    ExcitationParams,
    FaultPolicy,
    ScenarioConfig,
    SubDatasetCode,
    SubDatasetSpec,
    TimeGrid,
)
from .scenario import RealizedScenario, realize_scenario
from .storage import (
    CorpusError,
    Manifest,
    ManifestEntry,
    acquisition_filename,
    load_manifest,
    parse_filename,
    read_acquisition,
    verify_manifest,
    write_acquisition,
    write_columns,
    write_fault_labels,
    write_label_rows,
    write_manifest,
)
from .structure import (
    MomentCheck,
    MomentState,
    corroded_moment_check,
    corrosion_mass_loss,
    equivalent_mass,
    equivalent_stiffness,
    midspan_deflection,
    section_properties,
)

logger = logging.getLogger(__name__)

D4_TARGET_COUNT = 6600
D4_FRACTION = 0.5
D5_FRACTION = 0.3
ALL_CODES = tuple(SubDatasetCode)

ProgressCallback = Callable[[int], None]

_DESCRIPTIONS = {
    SubDatasetCode.D1: "Undamaged",
    SubDatasetCode.D2_1: "Fast damage, single -10% step",
    SubDatasetCode.D2_2: "Fast damage, 18 monthly -1% steps",
    SubDatasetCode.D2_3: "Fast damage, 6 doubling steps up to -32%",
    SubDatasetCode.D3_1: "Ageing corrosion (Lev. 0)",
    SubDatasetCode.D3_2: "Accelerated corrosion (Lev. 1)",
    SubDatasetCode.D3_3: "Accelerated corrosion (Lev. 3)",
    SubDatasetCode.D4: "Sensor faults on sampled undamaged acquisitions",
    SubDatasetCode.D5: "Fast + slow damage with sensor faults",
}
_SLOW_LEVELS = {SubDatasetCode.D3_1: 0, SubDatasetCode.D3_2: 1, SubDatasetCode.D3_3: 3}


def subdataset_spec(code: SubDatasetCode, grid: TimeGrid, onset_index: int = DAMAGE_ONSET_INDEX) -> SubDatasetSpec:
    """Catalogue entry of a sub-dataset on ``grid``."""
    code = SubDatasetCode(code)
    n = grid.n_acquisitions
    damage = DamageSpec()
    policy = None
    start = onset_index
    expected = n - onset_index

    if code is SubDatasetCode.D1:
        start, expected = 0, n
    elif code.value.startswith("D2"):
        damage = DamageSpec(fast=fast_steps(code.value[1:], grid, onset_index))
    elif code in _SLOW_LEVELS:
        damage = DamageSpec(slow=slow_spec(_SLOW_LEVELS[code], onset_index))
    elif code is SubDatasetCode.D4:
        target = min(D4_TARGET_COUNT, expected)
        policy = FaultPolicy(fraction=D4_FRACTION, target_count=target)
        expected = target
    else:
        damage = DamageSpec(fast=fast_steps("2.3", grid, onset_index), slow=slow_spec(3, onset_index))
        policy = FaultPolicy(fraction=D5_FRACTION)

    return SubDatasetSpec(
        code=code, start_index=start, stop_index=n, damage=damage, fault_policy=policy,
        expected_count=expected, description=_DESCRIPTIONS[code],
    )


def scenario_for(code: SubDatasetCode, base: ScenarioConfig) -> ScenarioConfig:
    """Base scenario with the damage and fault policy of a sub-dataset."""
    spec = subdataset_spec(code, base.grid)
    return base.model_copy(update={"damage_spec": spec.damage, "fault_policy": spec.fault_policy})


@dataclass(frozen=True)
class KMMatrix:
    """Per-acquisition stiffness (N/m) and mass (kg)."""

    k: np.ndarray
    m: np.ndarray

    @property
    def rows(self) -> np.ndarray:
        return np.column_stack((self.k, self.m))

    def __len__(self) -> int:
        return len(self.k)


def _as_realized(scenario: Union[ScenarioConfig, RealizedScenario]) -> RealizedScenario:
    return scenario if isinstance(scenario, RealizedScenario) else realize_scenario(scenario)


def _with_damage(realized: RealizedScenario, damage: DamageSeries) -> RealizedScenario:
    return RealizedScenario(config=realized.config, env=realized.env, load=realized.load, damage=damage)


def build_km_matrix(scenario: Union[ScenarioConfig, RealizedScenario]) -> KMMatrix:
    """k_i = k(E(T_i), I(d_i), r_i) and m_i = m(p_i, Δm(d_i)) for every grid hour."""
    realized = _as_realized(scenario)
    config = realized.config
    beam = config.beam
    modulus = youngs_modulus(realized.env.temperature, config.env_params)
    props = section_properties(beam.section, realized.damage.d_slow)
    k = equivalent_stiffness(modulus, props.inertia, beam.length_mm, realized.damage.r_fast, beam.boundary_factor)
    m = equivalent_mass(
        realized.load.p_des, beam.length_mm, corrosion_mass_loss(beam, props.area),
        beam.mass_participation, beam.gravity,
    )
    return KMMatrix(k=np.asarray(k), m=np.asarray(m))


def deflection_series(scenario: Union[ScenarioConfig, RealizedScenario]) -> np.ndarray:
    """Hourly midspan deflection (mm) including temperature, load and damage effects."""
    realized = _as_realized(scenario)
    config = realized.config
    beam = config.beam
    modulus = youngs_modulus(realized.env.temperature, config.env_params)
    props = section_properties(beam.section, realized.damage.d_slow)
    delta = midspan_deflection(realized.load.p_des, modulus, props.inertia, beam.length_mm, beam.boundary_factor)
    return np.asarray(delta) / (1.0 - realized.damage.r_fast)


def realized_for(code: SubDatasetCode, base: ScenarioConfig) -> RealizedScenario:
    realized = realize_scenario(base)
    spec = subdataset_spec(code, base.grid)
    return _with_damage(realized, damage_series(spec.damage, base.grid, realized.env))


def end_of_monitoring_check(realized: RealizedScenario) -> MomentCheck:
    """Support-moment check with the last corrosion depth and the realized peak live load."""
    config = realized.config
    params = config.load_params
    depth = float(realized.damage.d_slow[-1])
    check = corroded_moment_check(config.beam, depth, float(realized.load.p_q.max()),
                                  params.gamma_g1, params.gamma_g2, params.gamma_q)
    log = logger.warning if check.state is MomentState.FAILED else logger.info
    log(
        "Corrosion %.3f mm at end of monitoring: M_A %.2f kN·m against M_R,el %.2f / M_R,pl %.2f kN·m (%s)",
        depth, check.acting, check.elastic_resistance, check.plastic_resistance, check.state.value,
    )
    return check


def write_inputs(base: ScenarioConfig, out_root: Path, codes: Iterable[SubDatasetCode] = ALL_CODES) -> List[Path]:
    """Temperature, load and k-m series under ``out_root/input``."""
    realized = realize_scenario(base)
    folder = Path(out_root) / "input"
    index = np.arange(base.grid.n_acquisitions)
    written = [
        write_columns(folder / "temperature.txt", (index, realized.env.temperature, realized.env.humidity),
                      ("index", "T_degC", "RH_pct")),
        write_columns(folder / "load.txt", (index, realized.load.p_q_lt, realized.load.p_q_st, realized.load.p_des),
                      ("index", "p_Q_lt_kN_m", "p_Q_st_kN_m", "p_des_kN_m")),
    ]
    for code in codes:
        km = build_km_matrix(realized_for(SubDatasetCode(code), base))
        written.append(write_columns(folder / f"km_{SubDatasetCode(code).value}.txt", (index, km.k, km.m),
                                     ("index", "k_N_m", "m_kg")))
    return written


def write_deflections(base: ScenarioConfig, out_root: Path, codes: Iterable[SubDatasetCode] = ALL_CODES) -> Path:
    """``deflection_D1-5.txt``: sample index then one column per sub-dataset on the full grid."""
    codes = [SubDatasetCode(code) for code in codes]
    index = np.arange(base.grid.n_acquisitions)
    columns = [index]
    for code in codes:
        source = SubDatasetCode.D1 if code is SubDatasetCode.D4 else code
        columns.append(deflection_series(realized_for(source, base)))
    header = ["index"] + [code.value for code in codes]
    return write_columns(Path(out_root) / "deflection_D1-5.txt", columns, header)


def write_labels(base: ScenarioConfig, out_root: Path, code: SubDatasetCode, selection: Sequence[int],
                 plan: Mapping[int, FaultAssignment]) -> List[Path]:
    """Per-acquisition damage/fault labels and, for contaminated sub-datasets, the fault label file."""
    code = SubDatasetCode(code)
    realized = realized_for(code, base)
    folder = Path(out_root) / "labels"
    rows = np.asarray(selection, dtype=int)
    stamps = base.grid.timestamps()[rows].astype(str) if rows.size else np.array([], dtype=str)
    tags = [plan[i].fault_class.value if i in plan else None for i in rows.tolist()]
    written = [write_label_rows(folder / f"labels_{code.value}.txt", rows, stamps,
                                realized.damage.r_fast[rows], realized.damage.d_slow[rows], tags)]
    spec = subdataset_spec(code, base.grid)
    if spec.fault_policy is not None:
        fs = base.excitation.fs_hz
        labels = [fault_label(plan[i], fs) for i in sorted(plan)]
        written.append(write_fault_labels(folder / f"faults_{code.value}.txt", labels))
    return written


@dataclass(frozen=True)
class _WorkerContext:
    directory: Path
    suffix: str
    excitation: ExcitationParams
    master_seed: int
    zeta: float
    noise: bool
    k: np.ndarray
    m: np.ndarray
    temperature: np.ndarray
    p_des: np.ndarray
    r_fast: np.ndarray
    d_slow: np.ndarray
    timestamps: np.ndarray
    plan: Mapping[int, FaultAssignment] = field(default_factory=dict)


_CONTEXT: Optional[_WorkerContext] = None


def _init_worker(context: _WorkerContext) -> None:
    global _CONTEXT
    _CONTEXT = context


def _generate_one(i: int) -> ManifestEntry:
    ctx = _CONTEXT
    record = generate_acquisition(ctx.k[i], ctx.m[i], ctx.excitation, ctx.master_seed, i, ctx.zeta, ctx.noise)
    samples = record.samples
    assignment = ctx.plan.get(i)
    if assignment is not None:
        samples = apply_fault(samples, assignment, ctx.master_seed, ctx.excitation.fs_hz, ctx.excitation.length_s)
    fault = assignment.fault_class.value if assignment is not None else None

    name = acquisition_filename(i, ctx.suffix)
    attrs = {
        "index": i,
        "timestamp": str(ctx.timestamps[i]),
        "fs": ctx.excitation.fs_hz,
        "units": "m/s^2",
        "temperature": ctx.temperature[i],
        "p_des": ctx.p_des[i],
        "r_fast": ctx.r_fast[i],
        "d_slow": ctx.d_slow[i],
        "sigma_av": np.asarray(record.sigma_av),
        "f_extracted": record.f_extracted,
        "f_analytical": record.f_analytical,
        "n_retries": record.n_retries,
        "accepted": record.accepted,
        "k": record.k,
        "m": record.m,
        "sfm": fault,
    }
    digest = write_acquisition(ctx.directory / name, samples, attrs)
    return ManifestEntry(
        name=name, index=i, sha256=digest, accepted=record.accepted, n_retries=record.n_retries,
        f_extracted=record.f_extracted, f_analytical=record.f_analytical, fault_class=fault,
    )


def _run_tasks(context: _WorkerContext, tasks: Sequence[int], n_workers: int,
               progress: Optional[ProgressCallback]) -> List[ManifestEntry]:
    entries: List[ManifestEntry] = []
    if n_workers <= 1:
        _init_worker(context)
        results: Iterable[ManifestEntry] = map(_generate_one, tasks)
        for entry in results:
            entries.append(entry)
            if progress:
                progress(1)
        return entries

    with Pool(processes=n_workers, initializer=_init_worker, initargs=(context,)) as pool:
        for entry in pool.imap_unordered(_generate_one, tasks, chunksize=8):
            entries.append(entry)
            if progress:
                progress(1)
    return entries


@dataclass(frozen=True)
class GenerationSummary:
    code: SubDatasetCode
    directory: Path
    expected_count: int
    realized_count: int
    rejected_count: int
    contaminated_count: int
    elapsed_s: float
    manifest_path: Path
    end_state: Optional[MomentState] = None


def select_indices(spec: SubDatasetSpec, master_seed: int, indices: Optional[Sequence[int]] = None) -> List[int]:
    """Acquisitions a run produces: the window, optionally restricted, then target-sampled."""
    window = list(spec.window)
    if indices is not None:
        wanted = set(int(i) for i in indices)
        window = [i for i in window if i in wanted]
    policy = spec.fault_policy
    if policy is not None and policy.target_count is not None:
        target = min(policy.target_count, len(window))
        if target < policy.target_count:
            logger.warning("%s: sampling %d instead of %d acquisitions from a restricted window",
                           spec.code.value, target, policy.target_count)
        window = sample_targets(window, target, master_seed)
    return window


def run_generation(base: ScenarioConfig, code: SubDatasetCode, out_root: Path,
                   indices: Optional[Sequence[int]] = None, n_workers: Optional[int] = None,
                   progress: Optional[ProgressCallback] = None) -> GenerationSummary:
    """Generate one sub-dataset under ``out_root/<code>``.

    Args:
        base: Undamaged base scenario; damage and faults come from the catalogue.
        code: Sub-dataset to generate.
        out_root: Corpus root directory.
        indices: Optional restriction of the window to these grid indices.
        n_workers: Worker processes (defaults to ``base.n_workers``).
        progress: Called with 1 after each written acquisition.

    Returns:
        GenerationSummary of the run.
    """
    code = SubDatasetCode(code)
    spec = subdataset_spec(code, base.grid)
    realized = realized_for(code, base)
    km = build_km_matrix(realized)
    selection = select_indices(spec, base.master_seed, indices)
    end_state = end_of_monitoring_check(realized).state if spec.damage.slow is not None else None
    excitation = base.excitation

    plan: Dict[int, FaultAssignment] = {}
    if spec.fault_policy is not None:
        plan = plan_contamination(selection, spec.fault_policy, base.master_seed, excitation.fs_hz, excitation.n_samples)

    directory = Path(out_root) / code.value
    directory.mkdir(parents=True, exist_ok=True)
    context = _WorkerContext(
        directory=directory,
        suffix=spec.file_suffix,
        excitation=excitation,
        master_seed=base.master_seed,
        zeta=base.beam.zeta,
        noise=base.measurement_noise,
        k=km.k,
        m=km.m,
        temperature=np.asarray(realized.env.temperature),
        p_des=np.asarray(realized.load.p_des),
        r_fast=np.asarray(realized.damage.r_fast),
        d_slow=np.asarray(realized.damage.d_slow),
        timestamps=base.grid.timestamps().astype(str),
        plan=plan,
    )

    workers = n_workers or base.n_workers
    logger.info("%s: generating %d acquisitions with %d worker(s)", code.value, len(selection), workers)
    started = time.perf_counter()
    entries = _run_tasks(context, selection, workers, progress)
    elapsed = time.perf_counter() - started

    manifest = Manifest(code=code.value, master_seed=base.master_seed, expected_count=len(selection),
                        entries=tuple(entries))
    manifest_path = write_manifest(directory, manifest)
    write_labels(base, out_root, code, selection, plan)

    rate = len(entries) / elapsed if elapsed > 0 else float("inf")
    logger.info(
        "%s: %d acquisitions in %.1f s (%.2f/s, full grid of %d would take %.2f h)",
        code.value, len(entries), elapsed, rate, base.grid.n_acquisitions,
        base.grid.n_acquisitions / rate / 3600 if rate else float("nan"),
    )
    if manifest.rejected_count:
        logger.warning("%s: %d acquisitions failed the frequency check", code.value, manifest.rejected_count)

    return GenerationSummary(
        code=code,
        directory=directory,
        expected_count=spec.expected_count,
        realized_count=len(entries),
        rejected_count=manifest.rejected_count,
        contaminated_count=len(plan),
        elapsed_s=elapsed,
        manifest_path=manifest_path,
        end_state=end_state,
    )


def fits_grid(code: SubDatasetCode, grid: TimeGrid, onset_index: int = DAMAGE_ONSET_INDEX) -> bool:
    """Whether the sub-dataset window exists on ``grid``; every code except D1 starts at the damage onset."""
    return SubDatasetCode(code) is SubDatasetCode.D1 or onset_index < grid.n_acquisitions


def generate_corpus(base: ScenarioConfig, codes: Iterable[SubDatasetCode], out_root: Path,
                    indices: Optional[Sequence[int]] = None, n_workers: Optional[int] = None,
                    progress: Optional[ProgressCallback] = None) -> List[GenerationSummary]:
    """Inputs, deflections and every requested sub-dataset.

    Codes whose window starts beyond the end of the grid are skipped with a warning.
    """
    out_root = Path(out_root)
    selected = []
    for code in (SubDatasetCode(c) for c in codes):
        if fits_grid(code, base.grid):
            selected.append(code)
        else:
            logger.warning("%s: skipped, damage onset %d lies beyond the %d-acquisition grid",
                           code.value, DAMAGE_ONSET_INDEX, base.grid.n_acquisitions)
    if not selected:
        return []
    write_inputs(base, out_root, selected)
    write_deflections(base, out_root, selected)
    return [run_generation(base, code, out_root, indices, n_workers, progress) for code in selected]


@dataclass(frozen=True)
class ContaminationSummary:
    directory: Path
    processed_count: int
    contaminated_count: int
    labels_path: Path
    manifest_path: Path


def contaminate_directory(source: Path, out_dir: Path, policy: FaultPolicy, master_seed: int,
                          code: SubDatasetCode = SubDatasetCode.D4,
                          progress: Optional[ProgressCallback] = None) -> ContaminationSummary:
    """Contaminate copies of an existing sub-dataset directory.

    Raises:
        CorpusError: If the source holds no acquisition files.
    """
    source = Path(source)
    files = {parse_filename(path.name)[0]: path for path in source.glob("acc*.h5")}
    if not files:
        raise CorpusError(f"No acquisition files in {source}")
    code = SubDatasetCode(code)
    indices = sorted(files)
    if policy.target_count is not None:
        indices = sample_targets(indices, min(policy.target_count, len(indices)), master_seed)

    first = read_acquisition(files[indices[0]])
    fs = float(first.attrs.get("fs", 100.0))
    n_samples = len(first.samples)
    plan = plan_contamination(indices, policy, master_seed, fs, n_samples)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in indices:
        stored = read_acquisition(files[i])
        samples = stored.samples.astype(float)
        attrs = dict(stored.attrs)
        assignment = plan.get(i)
        if assignment is not None:
            samples = apply_fault(samples, assignment, master_seed, fs, n_samples / fs)
            attrs["sfm"] = assignment.fault_class.value
        name = acquisition_filename(i, code.file_suffix)
        digest = write_acquisition(out_dir / name, samples, attrs)
        entries.append(ManifestEntry(
            name=name, index=i, sha256=digest, accepted=bool(attrs.get("accepted", True)),
            n_retries=int(attrs.get("n_retries", 1)), f_extracted=float(attrs.get("f_extracted", 0.0)),
            f_analytical=float(attrs.get("f_analytical", 0.0)), fault_class=attrs.get("sfm"),
        ))
        if progress:
            progress(1)

    manifest_path = write_manifest(out_dir, Manifest(code=code.value, master_seed=master_seed,
                                                     expected_count=len(indices), entries=tuple(entries)))
    labels_path = write_fault_labels(out_dir / f"faults_{code.value}.txt",
                                     [fault_label(plan[i], fs) for i in sorted(plan)])
    logger.info("Contaminated %d of %d acquisitions into %s", len(plan), len(indices), out_dir)
    return ContaminationSummary(directory=out_dir, processed_count=len(indices), contaminated_count=len(plan),
                                labels_path=labels_path, manifest_path=manifest_path)


@dataclass(frozen=True)
class FileReport:
    name: str
    index: int
    n_samples: int
    fs: float
    units: str
    f_extracted: Optional[float]
    f_analytical: Optional[float]
    accepted: Optional[bool]
    fault_class: Optional[str]
    missing_samples: int

    @property
    def relative_error(self) -> Optional[float]:
        if not self.f_extracted or not self.f_analytical:
            return None
        return abs(self.f_extracted / self.f_analytical - 1.0)


@dataclass(frozen=True)
class CorpusReport:
    directory: Path
    code: str
    file_count: int
    manifest_count: int
    catalogue_count: int
    rejected_count: int
    fault_counts: Dict[str, int]
    problems: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems and self.file_count == self.manifest_count


def inspect_file(path: Path, excitation: Optional[ExcitationParams] = None) -> FileReport:
    """Re-analyse one stored acquisition.

    Raises:
        CorpusError: If the file is unreadable or misnamed.
    """
    path = Path(path)
    index, _ = parse_filename(path.name)
    stored = read_acquisition(path)
    fs = float(stored.attrs.get("fs", 100.0))
    params = excitation or ExcitationParams(fs_hz=fs, length_s=len(stored.samples) / fs)
    missing = int(np.count_nonzero(np.isnan(stored.samples)))
    try:
        f_extr: Optional[float] = welch_dominant_frequency(np.nan_to_num(stored.samples.astype(float)), params)
    except SimulationError:
        f_extr = None
    accepted = stored.attrs.get("accepted")
    return FileReport(
        name=path.name,
        index=index,
        n_samples=len(stored.samples),
        fs=fs,
        units=str(stored.attrs.get("units", "m/s^2")),
        f_extracted=f_extr,
        f_analytical=stored.attrs.get("f_analytical"),
        accepted=None if accepted is None else bool(accepted),
        fault_class=stored.attrs.get("sfm"),
        missing_samples=missing,
    )


def inspect_corpus(directory: Path, grid: Optional[TimeGrid] = None) -> CorpusReport:
    """Check a sub-dataset directory against its manifest and the catalogue count."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    problems = tuple(verify_manifest(directory))
    counts: Dict[str, int] = {}
    for entry in manifest.entries:
        if entry.fault_class:
            counts[entry.fault_class] = counts.get(entry.fault_class, 0) + 1
    catalogue = subdataset_spec(SubDatasetCode(manifest.code), grid or TimeGrid()).expected_count
    return CorpusReport(
        directory=directory,
        code=manifest.code,
        file_count=len(list(directory.glob("acc*.h5"))),
        manifest_count=manifest.realized_count,
        catalogue_count=catalogue,
        rejected_count=manifest.rejected_count,
        fault_counts=counts,
        problems=problems,
    )

