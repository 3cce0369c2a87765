"""Configuration and record models for the benchmark generator using Pydantic v2."""

from datetime import date, datetime
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

HOURS_PER_YEAR = 8760


class BenchmarkError(Exception):
    """Root of every error raised by the generator."""


class GridError(BenchmarkError, ValueError):
    """Raised for invalid grids or indices outside the hourly grid."""


class OutputFormat(str, Enum):
    """Output format options."""
    TEXT = "text"
    JSON = "json"


class LeapDayPolicy(str, Enum):
    """How Feb 29 is treated on the hourly grid."""
    DROP_FEB29 = "drop_feb29"


class TemperatureSource(str, Enum):
    """Where the hourly temperature and humidity series comes from."""
    SYNTHETIC = "synthetic"
    EXTERNAL_FILE = "external_file"


class FaultClass(str, Enum):
    """Sensor fault and malfunction classes."""
    DRIFT = "D"
    BIAS = "B"
    SPIKES = "S"
    GAIN = "G"
    NOISE = "N"
    MISSING = "M"
    CABLE_TEMPORARY = "C_temp"
    CABLE_PERMANENT = "C_perm"

    @property
    def is_single_acquisition(self) -> bool:
        """Spikes and temporary detachment affect one acquisition only."""
        return self in (FaultClass.SPIKES, FaultClass.CABLE_TEMPORARY)


class SubDatasetCode(str, Enum):
    """Sub-dataset identifiers."""
    D1 = "D1"
    D2_1 = "D2.1"
    D2_2 = "D2.2"
    D2_3 = "D2.3"
    D3_1 = "D3.1"
    D3_2 = "D3.2"
    D3_3 = "D3.3"
    D4 = "D4"
    D5 = "D5"

    @property
    def file_suffix(self) -> str:
        """Digits after the dash in the acquisition file name (``D2.1`` -> ``21``)."""
        return self.value[1:].replace(".", "")


@lru_cache(maxsize=16)
def _hourly_stamps(start: date, n_years: int) -> np.ndarray:
    begin = np.datetime64(start.isoformat(), "D").astype("datetime64[h]")
    stop_day = start.replace(year=start.year + n_years)
    end = np.datetime64(stop_day.isoformat(), "D").astype("datetime64[h]")
    stamps = np.arange(begin, end, np.timedelta64(1, "h"))

    months = stamps.astype("datetime64[M]")
    day_in_month = (stamps.astype("datetime64[D]") - months.astype("datetime64[D]")).astype(int)
    is_feb29 = (months.astype(int) % 12 == 1) & (day_in_month == 28)
    stamps = stamps[~is_feb29]
    stamps.flags.writeable = False
    return stamps


class TimeGrid(BaseModel):
    """Hourly acquisition grid with every Feb 29 removed."""
    model_config = ConfigDict(frozen=True)

    start_date: date = Field(default=date(2020, 1, 1), description="First acquisition day (00:00)")
    n_years: int = Field(default=3, gt=0, description="Number of monitored years")
    step_hours: int = Field(default=1, ge=1, le=1, description="Grid step in hours (fixed)")
    leap_day_policy: LeapDayPolicy = Field(default=LeapDayPolicy.DROP_FEB29)

    @field_validator("start_date")
    @classmethod
    def validate_start_date(cls, v: date) -> date:
        if v.month == 2 and v.day == 29:
            raise ValueError("Grid cannot start on Feb 29")
        return v

    @property
    def n_acquisitions(self) -> int:
        """Number of hourly acquisitions on the grid."""
        return self.n_years * HOURS_PER_YEAR

    def timestamps(self) -> np.ndarray:
        """Read-only ``datetime64[h]`` array of every grid instant."""
        return _hourly_stamps(self.start_date, self.n_years)

    def index_of(self, ts: datetime) -> int:
        """Grid index of a timestamp.

        Raises:
            GridError: If the timestamp is not a grid instant.
        """
        stamps = self.timestamps()
        target = np.datetime64(ts, "h")
        pos = int(np.searchsorted(stamps, target))
        if pos >= len(stamps) or stamps[pos] != target:
            raise GridError(f"{ts} is not on the hourly grid")
        return pos

    def timestamp_at(self, index: int) -> datetime:
        """Timestamp of a grid index.

        Raises:
            GridError: If the index is out of range.
        """
        self.check_index(index)
        return self.timestamps()[index].astype("datetime64[s]").item()

    def check_index(self, index: int) -> None:
        if not 0 <= index < self.n_acquisitions:
            raise GridError(f"Index {index} outside [0, {self.n_acquisitions})")

    def year_slice(self, year: int) -> slice:
        """Slice of grid indices that fall in a calendar year."""
        years = self.timestamps().astype("datetime64[Y]").astype(int) + 1970
        found = np.flatnonzero(years == year)
        if found.size == 0:
            raise GridError(f"Year {year} is not on the grid")
        return slice(int(found[0]), int(found[-1]) + 1)

    def month_start_indices(self, from_index: int = 0) -> np.ndarray:
        """Indices of every first-of-month 00:00 at or after ``from_index``."""
        stamps = self.timestamps()
        is_start = stamps == stamps.astype("datetime64[M]").astype("datetime64[h]")
        found = np.flatnonzero(is_start)
        return found[found >= from_index]

    def hour_of_day(self) -> np.ndarray:
        stamps = self.timestamps()
        return (stamps - stamps.astype("datetime64[D]").astype("datetime64[h]")).astype(int)

    def day_of_year(self) -> np.ndarray:
        """Zero-based day of year on a 365-day calendar."""
        stamps = self.timestamps()
        days = stamps.astype("datetime64[D]")
        years = stamps.astype("datetime64[Y]")
        doy = (days - years.astype("datetime64[D]")).astype(int)
        year_num = years.astype(int) + 1970
        leap = (year_num % 4 == 0) & ((year_num % 100 != 0) | (year_num % 400 == 0))
        return np.where(leap & (doy > 59), doy - 1, doy)


class IPESection(BaseModel):
    """Hot-rolled I-section catalogue data (mm)."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(default="IPE400")
    h: float = Field(default=400.0, gt=0, description="Section depth")
    b: float = Field(default=180.0, gt=0, description="Flange width")
    t_w: float = Field(default=8.6, gt=0, description="Web thickness")
    t_f: float = Field(default=13.5, gt=0, description="Flange thickness")
    r: float = Field(default=21.0, ge=0, description="Root fillet radius")
    catalog_area: float = Field(default=84.46e4, gt=0, description="Area as printed in the design table (mm²)")
    catalog_inertia: float = Field(default=231.30e6, gt=0, description="Strong-axis inertia (mm⁴)")
    catalog_w_el: float = Field(default=1156e3, gt=0, description="Elastic modulus (mm³)")
    catalog_w_pl: float = Field(default=1307e3, gt=0, description="Plastic modulus (mm³)")

    @model_validator(mode="after")
    def validate_proportions(self) -> "IPESection":
        if 2 * self.t_f >= self.h:
            raise ValueError("Flanges thicker than half the depth")
        if self.t_w >= self.b:
            raise ValueError("Web thicker than flange width")
        return self


class BeamModel(BaseModel):
    """Fixed-fixed floor beam: geometry, material, constraints and dead loads."""
    model_config = ConfigDict(frozen=True)

    length_mm: float = Field(default=6000.0, gt=0, description="Span L")
    section: IPESection = Field(default_factory=IPESection)
    e0_mpa: float = Field(default=210000.0, gt=0, description="Young's modulus at 20 °C")
    sigma_y_mpa: float = Field(default=235.0, gt=0)
    f_yd_mpa: float = Field(default=223.9, gt=0, description="Design yield strength")
    steel_density: float = Field(default=7850.0, gt=0, description="kg/m³")
    concrete_density: float = Field(default=2500.0, gt=0, description="kg/m³")
    slab_thickness_mm: float = Field(default=180.0, gt=0)
    tributary_area_m2: float = Field(default=30.0, gt=0)
    non_structural_dead_load: float = Field(default=6.0, ge=0, description="p_G2 in kN/m")
    reference_live_load: float = Field(default=15.0, ge=0, description="Time-invariant p_Q in kN/m")
    zeta: float = Field(default=0.05, gt=0, lt=1, description="Damping ratio")
    mass_participation: float = Field(default=1.0, gt=0)
    boundary_factor: float = Field(default=384.0, gt=0, description="UDL midspan compliance constant (fixed-fixed)")
    support: str = Field(default="fixed-fixed")
    deflection_limit_ratio: float = Field(default=250.0, gt=0, description="δ_lim = L / ratio")
    gravity: float = Field(default=9.81, gt=0)

    @property
    def tributary_width_m(self) -> float:
        """Slab width carried by the beam (A_s / L)."""
        return self.tributary_area_m2 / (self.length_mm / 1000.0)

    @property
    def deflection_limit_mm(self) -> float:
        return self.length_mm / self.deflection_limit_ratio


class SyntheticTemperatureParams(BaseModel):
    """Seasonal + diurnal + AR(1) temperature and anticorrelated humidity."""
    model_config = ConfigDict(frozen=True)

    annual_mean: float = Field(default=15.0, description="°C")
    seasonal_amplitude: float = Field(default=10.0, ge=0, description="°C")
    diurnal_amplitude: float = Field(default=4.0, ge=0, description="°C")
    seasonal_phase: float = Field(default=-1.83, description="rad; coldest around mid-January")
    diurnal_phase: float = Field(default=-2.36, description="rad; warmest mid-afternoon")
    ar_coefficient: float = Field(default=0.95, ge=0, lt=1)
    noise_std: float = Field(default=0.5, ge=0, description="°C")
    rh_base: float = Field(default=70.0, ge=0, le=100, description="%")
    rh_coupling: float = Field(default=2.5, ge=0, description="% per °C")
    rh_noise_std: float = Field(default=4.0, ge=0, description="%")


class EnvParams(BaseModel):
    """Temperature source and the temperature-to-modulus law."""
    model_config = ConfigDict(frozen=True)

    alpha_t: float = Field(default=0.0015, ge=0, description="1/°C amplification")
    e0_mpa: float = Field(default=210000.0, gt=0)
    e1: float = Field(default=3.768, gt=0)
    e2: float = Field(default=1.0, gt=0)
    e3: float = Field(default=639.0, gt=0, description="°C")
    e4: float = Field(default=1.65e6, gt=0, description="°C")
    temp_source: TemperatureSource = Field(default=TemperatureSource.SYNTHETIC)
    temp_file: Optional[Path] = Field(default=None, description="CSV with timestamp,T_degC,RH_pct")
    synth: SyntheticTemperatureParams = Field(default_factory=SyntheticTemperatureParams)
    validity_window: Tuple[float, float] = Field(default=(-40.0, 100.0))

    @model_validator(mode="after")
    def validate_source(self) -> "EnvParams":
        if self.temp_source is TemperatureSource.EXTERNAL_FILE and self.temp_file is None:
            raise ValueError("temp_file is required for an external temperature source")
        if self.validity_window[0] >= self.validity_window[1]:
            raise ValueError("validity_window must be increasing")
        return self


class LiveLoadParams(BaseModel):
    """Sustained and intermittent live-load parameters (residential)."""
    model_config = ConfigDict(frozen=True)

    a0: float = Field(default=20.0, gt=0, description="Reference area A0 (m²)")
    area: float = Field(default=30.0, gt=0, description="Tributary area A (m²)")
    kappa: float = Field(default=1.0, ge=0)
    m_lt: float = Field(default=3.0, gt=0, description="kN/m²")
    sigma_v: float = Field(default=0.15, gt=0, description="kN/m²")
    sigma_u: float = Field(default=0.3, gt=0, description="kN/m²")
    inv_lambda: float = Field(default=10.0, gt=0, description="Mean sustained renewal time (years)")
    m_st: float = Field(default=0.3, gt=0, description="kN/m²")
    sigma_big_u: float = Field(default=0.4, gt=0, description="σ_U in kN/m²")
    inv_nu: float = Field(default=0.2, gt=0, description="Mean intermittent inter-arrival (years)")
    d_p_days: float = Field(default=5.0, gt=0, description="Intermittent event duration")
    sigma_lt_override: Optional[float] = Field(default=0.07, gt=0)
    sigma_st_override: Optional[float] = Field(default=0.03, gt=0)
    gamma_g1: float = Field(default=1.3, gt=0, description="ULS factor, structural dead load")
    gamma_g2: float = Field(default=1.5, gt=0, description="ULS factor, non-structural dead load")
    gamma_q: float = Field(default=1.5, gt=0, description="ULS factor, live load")
    ratio_band: Tuple[float, float] = Field(default=(0.4783, 0.6729), description="Expected p_Q/p_G range")

    @model_validator(mode="after")
    def validate_area(self) -> "LiveLoadParams":
        if self.area <= self.a0:
            raise ValueError("Tributary area must exceed A0")
        return self


class BandSpec(BaseModel):
    """One band-limited Gaussian excitation component."""
    model_config = ConfigDict(frozen=True)

    f_low: float = Field(gt=0, description="Hz")
    f_high: float = Field(gt=0, description="Hz")
    sigma_low: float = Field(ge=0, description="m/s²")
    sigma_high: float = Field(ge=0, description="m/s²")

    @model_validator(mode="after")
    def validate_ranges(self) -> "BandSpec":
        if self.f_low >= self.f_high:
            raise ValueError("Band edges must be increasing")
        if self.sigma_low > self.sigma_high:
            raise ValueError("σ range must be increasing")
        return self


class ExcitationParams(BaseModel):
    """Ambient input, sampling and frequency-check settings."""
    model_config = ConfigDict(frozen=True)

    fs_hz: float = Field(default=100.0, gt=0)
    length_s: float = Field(default=180.0, gt=0)
    human: BandSpec = Field(default=BandSpec(f_low=1.2, f_high=4.8, sigma_low=5e-6, sigma_high=5e-4))
    traffic: BandSpec = Field(default=BandSpec(f_low=7.0, f_high=15.0, sigma_low=1e-6, sigma_high=2e-4))
    filter_order: int = Field(default=4, ge=1)
    target_resolution_hz: float = Field(default=0.0056, gt=0)
    tolerance: float = Field(default=0.01, gt=0)
    max_simulations: int = Field(default=10, ge=1)
    search_band: Tuple[float, float] = Field(default=(0.5, 20.0))
    warmup_s: float = Field(default=5.0, ge=0)
    noise_std: float = Field(default=1e-6, ge=0, description="Measurement WGN std when enabled (m/s²)")
    comfort_limit: float = Field(default=5e-3, gt=0, description="Peak |a| plausibility bound (m/s²)")

    @model_validator(mode="after")
    def validate_bands(self) -> "ExcitationParams":
        nyquist = self.fs_hz / 2
        low, high = sorted((self.human, self.traffic), key=lambda band: band.f_low)
        if low.f_high > high.f_low:
            raise ValueError("Excitation bands overlap")
        if high.f_high >= nyquist or self.search_band[1] > nyquist:
            raise ValueError("Band above Nyquist frequency")
        if self.search_band[0] >= self.search_band[1]:
            raise ValueError("search_band must be increasing")
        return self

    @property
    def n_samples(self) -> int:
        """Samples per acquisition."""
        return int(round(self.fs_hz * self.length_s))

    @property
    def warmup_samples(self) -> int:
        return int(round(self.fs_hz * self.warmup_s))


class FastStep(BaseModel):
    """One stiffness step: cumulative decay rate from ``onset_index`` onward."""
    model_config = ConfigDict(frozen=True)

    onset_index: int = Field(ge=0)
    rate: float = Field(ge=0, lt=1)


class SlowDamageSpec(BaseModel):
    """Atmospheric corrosion dose-response coefficients and drivers."""
    model_config = ConfigDict(frozen=True)

    a: Optional[float] = Field(default=None, gt=0, description="Scale (μm); None calibrates to reference_rate_um")
    b: float = Field(default=1.0, gt=0, description="Time exponent")
    c: float = Field(default=3800.0, gt=0, description="TOW normalisation (h/yr)")
    d: float = Field(default=0.46, gt=0)
    e: float = Field(default=25.0, gt=0, description="SO2 normalisation (μg/m³)")
    f: float = Field(default=0.62, gt=0)
    g: float = Field(default=50.0, gt=0, description="Chloride normalisation")
    h: float = Field(default=0.34, gt=0)
    j: float = Field(default=0.016, description="Temperature coefficient (1/°C)")
    t0: float = Field(default=20.0, description="°C offset")
    so2: float = Field(default=17.5, ge=0, description="μg/m³")
    chloride: float = Field(default=1.0, ge=0, description="mg/m²/day")
    tow_hours: Optional[float] = Field(default=None, ge=0, description="None derives TOW from the environment")
    reference_rate_um: float = Field(default=47.03, gt=0, description="Depth after one year at multiplier 1")
    end_depth_mm: Optional[float] = Field(
        default=0.17, gt=0, description="Depth at the end of monitoring at multiplier 1; None keeps the calibrated rate",
    )
    calibration_year: Optional[int] = Field(default=None, description="None uses the first grid year")
    rate_multiplier: float = Field(default=1.0, gt=0)
    exposure_start_index: int = Field(default=13104, ge=0)


class DamageSpec(BaseModel):
    """Fast step schedule plus optional slow corrosion."""
    model_config = ConfigDict(frozen=True)

    fast: Tuple[FastStep, ...] = Field(default=())
    slow: Optional[SlowDamageSpec] = Field(default=None)

    @field_validator("fast")
    @classmethod
    def validate_fast(cls, v: Tuple[FastStep, ...]) -> Tuple[FastStep, ...]:
        for prev, step in zip(v, v[1:]):
            if step.onset_index <= prev.onset_index:
                raise ValueError("Fast onsets must be strictly increasing")
            if step.rate <= prev.rate:
                raise ValueError("Cumulative fast rates must be strictly increasing")
        return v


def _ordered(v: Tuple[float, float]) -> Tuple[float, float]:
    low, high = v
    return (low, high) if low <= high else (high, low)


class FaultPolicy(BaseModel):
    """Which faults are injected, how often and with which parameter ranges.

    Ranges may be given with the larger bound first; they are normalised.
    """
    model_config = ConfigDict(frozen=True)

    classes: Tuple[FaultClass, ...] = Field(default=tuple(FaultClass))
    fraction: float = Field(default=0.5, ge=0, le=1)
    target_count: Optional[int] = Field(default=None, gt=0, description="Acquisitions sampled from the window")
    run_length: Tuple[int, int] = Field(default=(5, 25))
    drift: Tuple[float, float] = Field(default=(1e-3, 2e-3))
    bias: Tuple[float, float] = Field(default=(1.2, 1.7))
    spike: Tuple[float, float] = Field(default=(5e-3, 5e-2))
    spike_count_factor: Tuple[float, float] = Field(default=(0.1, 0.2), description="× f_s spikes")
    gain: Tuple[float, float] = Field(default=(1.1, 3.1))
    noise: Tuple[float, float] = Field(default=(1e-5, 1e-3))
    missing_start: Tuple[float, float] = Field(default=(0.2, 0.8), description="Gap start as fraction of record")
    window_start: Tuple[float, float] = Field(default=(0.0, 0.8), description="Onset as fraction of record")
    cable_frequency: Tuple[float, float] = Field(default=(0.5, 1.5))
    cable_amplitude: Tuple[float, float] = Field(default=(0.05, 0.2))
    cable_decay: Tuple[float, float] = Field(default=(0.02, 0.05))
    cable_duration_s: Tuple[float, float] = Field(default=(10.0, 60.0))

    @field_validator(
        "drift", "bias", "spike", "spike_count_factor", "gain", "noise", "missing_start",
        "window_start", "cable_frequency", "cable_amplitude", "cable_decay", "cable_duration_s",
    )
    @classmethod
    def normalise_range(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        return _ordered(v)

    @field_validator("run_length")
    @classmethod
    def validate_run_length(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        low, high = _ordered(v)
        if low < 1:
            raise ValueError("Run length must be at least one acquisition")
        return (int(low), int(high))

    @field_validator("classes")
    @classmethod
    def validate_classes(cls, v: Tuple[FaultClass, ...]) -> Tuple[FaultClass, ...]:
        if len(set(v)) != len(v):
            raise ValueError("Fault classes must be unique")
        return v


class ScenarioConfig(BaseModel):
    """Everything that determines a generated corpus."""
    model_config = ConfigDict(frozen=True)

    beam: BeamModel = Field(default_factory=BeamModel)
    grid: TimeGrid = Field(default_factory=TimeGrid)
    load_params: LiveLoadParams = Field(default_factory=LiveLoadParams)
    env_params: EnvParams = Field(default_factory=EnvParams)
    excitation: ExcitationParams = Field(default_factory=ExcitationParams)
    damage_spec: DamageSpec = Field(default_factory=DamageSpec)
    fault_policy: Optional[FaultPolicy] = Field(default=None)
    master_seed: int = Field(default=20200101, ge=0, lt=2**64)
    n_workers: int = Field(default=1, ge=1)
    measurement_noise: bool = Field(default=False, description="Add WGN measurement noise to every acquisition")


class CovariateRecord(BaseModel):
    """Frozen covariate vector of one acquisition."""
    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    timestamp: datetime
    temperature: float = Field(description="°C")
    p_des: float = Field(gt=0, description="kN/m")
    sigma_av: Tuple[float, float] = Field(description="Human and traffic input std (m/s²)")
    d_fast: float = Field(ge=0, lt=1)
    d_slow: float = Field(ge=0, description="Corrosion depth (mm)")
    sfm: Optional[FaultClass] = Field(default=None)
    epsilon_flag: bool = Field(default=False)


class FaultLabel(BaseModel):
    """Fault applied to one contaminated acquisition."""
    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    fault_class: FaultClass
    params: Dict[str, float] = Field(default_factory=dict)
    t_start: float = Field(ge=0, description="s")
    t_end: float = Field(ge=0, description="s")
    run_id: int = Field(default=0, ge=0)
    run_position: int = Field(default=0, ge=0)

    @property
    def param_summary(self) -> str:
        return ";".join(f"{key}={value:.6g}" for key, value in sorted(self.params.items()))


class SubDatasetSpec(BaseModel):
    """Declarative description of one sub-dataset."""
    model_config = ConfigDict(frozen=True)

    code: SubDatasetCode
    start_index: int = Field(ge=0)
    stop_index: int = Field(gt=0)
    damage: DamageSpec = Field(default_factory=DamageSpec)
    fault_policy: Optional[FaultPolicy] = Field(default=None)
    expected_count: int = Field(gt=0)
    description: str = Field(default="")

    @model_validator(mode="after")
    def validate_window(self) -> "SubDatasetSpec":
        if self.stop_index <= self.start_index:
            raise ValueError("Sub-dataset window is empty")
        if self.expected_count > self.stop_index - self.start_index:
            raise ValueError("Expected count exceeds window length")
        return self

    @property
    def file_suffix(self) -> str:
        return self.code.file_suffix

    @property
    def window(self) -> range:
        return range(self.start_index, self.stop_index)


class AppConfig(BaseModel):
    """Application preferences."""
    model_config = ConfigDict()

    default_workers: Optional[int] = Field(default=None, gt=0,
                                           description="Default worker processes; None keeps the scenario value")
    default_seed: Optional[int] = Field(default=None, description="Default master seed")
    output_dir: str = Field(default="corpus", description="Default corpus directory")
    output_format: OutputFormat = Field(default=OutputFormat.TEXT, description="Default output format")
    verbose: bool = Field(default=False, description="Enable debug logging by default")

    @field_validator("default_seed")
    @classmethod
    def validate_seed(cls, v):
        if v is not None and (v < 0 or v > 2**64 - 1):
            raise ValueError("Seed must be between 0 and 2^64 - 1")
        return v
