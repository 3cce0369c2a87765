"""Ambient excitation, SDOF state-space response and the frequency-checked acquisition loop."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import signal

from .models import BandSpec, BenchmarkError, ExcitationParams, FaultClass
from .seeding import AMBIENT_INPUT, AMBIENT_SIGMA, MEASUREMENT_NOISE, rng_for
from .structure import analytical_frequency

logger = logging.getLogger(__name__)


class SimulationError(BenchmarkError, ValueError):
    """Raised for invalid SDOF parameters, unstable integration or unusable signals."""


@dataclass(frozen=True)
class ColoredInput:
    """Band-limited ambient input (m/s²) and its two components."""

    human: np.ndarray
    traffic: np.ndarray
    sigma_human: float
    sigma_traffic: float

    @property
    def total(self) -> np.ndarray:
        return self.human + self.traffic


@dataclass(frozen=True)
class SdofResponse:
    displacement: np.ndarray
    acceleration: np.ndarray


@dataclass(frozen=True)
class AccelerationRecord:
    """One acquisition with its frequency-check diagnostics."""

    index: int
    samples: np.ndarray
    f_extracted: float
    f_analytical: float
    n_retries: int
    accepted: bool
    k: float
    m: float
    sigma_av: Tuple[float, float]
    attempt_errors: Tuple[float, ...] = field(default=())
    fault_class: Optional[FaultClass] = None

    @property
    def relative_error(self) -> float:
        return abs(self.f_extracted / self.f_analytical - 1.0)


def bandpass_sos(band: BandSpec, fs: float, order: int = 4) -> np.ndarray:
    return signal.butter(order, [band.f_low, band.f_high], btype="bandpass", fs=fs, output="sos")


def ambient_sigmas(params: ExcitationParams, rng: np.random.Generator) -> Tuple[float, float]:
    """Human and traffic input standard deviations, uniform within their ranges."""
    return (
        float(rng.uniform(params.human.sigma_low, params.human.sigma_high)),
        float(rng.uniform(params.traffic.sigma_low, params.traffic.sigma_high)),
    )


def colored_input(params: ExcitationParams, seed=None, sigmas: Optional[Tuple[float, float]] = None,
                  n_samples: Optional[int] = None) -> ColoredInput:
    """Two zero-mean Gaussian sequences band-pass filtered to the human and traffic bands.

    Args:
        params: Excitation settings.
        seed: Anything ``numpy.random.default_rng`` accepts.
        sigmas: Fixed (human, traffic) std; drawn from the configured ranges when omitted.
        n_samples: Output length; defaults to one acquisition.

    Returns:
        ColoredInput whose components carry the requested std before filtering.
    """
    rng = np.random.default_rng(seed)
    if sigmas is None:
        sigmas = ambient_sigmas(params, rng)
    n = n_samples or params.n_samples
    components = []
    for band, sigma in zip((params.human, params.traffic), sigmas):
        white = sigma * rng.standard_normal(n)
        components.append(signal.sosfiltfilt(bandpass_sos(band, params.fs_hz, params.filter_order), white))
    return ColoredInput(human=components[0], traffic=components[1], sigma_human=sigmas[0], sigma_traffic=sigmas[1])


def simulate_sdof(k: float, m: float, c: float, ground: np.ndarray, fs: float,
                  noise: Optional[np.ndarray] = None) -> SdofResponse:
    """Integrate m ẍ + c ẋ + k x = m u (+ ω_M) with an exact zero-order-hold discretization.

    Args:
        k: Stiffness (N/m).
        m: Mass (kg).
        c: Viscous damping (N·s/m).
        ground: Input u in m/s².
        fs: Sampling frequency (Hz).
        noise: Optional measurement noise force per unit mass (m/s²).

    Returns:
        SdofResponse with displacement (m) and acceleration (m/s²).

    Raises:
        SimulationError: If parameters are non-positive or the response is not finite.
    """
    if k <= 0 or m <= 0 or c <= 0:
        raise SimulationError(f"SDOF parameters must be positive (k={k}, m={m}, c={c})")
    u = np.asarray(ground, dtype=float)
    if noise is not None:
        u = u + noise

    a = np.array([[0.0, 1.0], [-k / m, -c / m]])
    b = np.array([[0.0], [1.0]])
    out = np.array([[1.0, 0.0], [-k / m, -c / m]])
    feedthrough = np.array([[0.0], [1.0]])
    ad, bd, cd, dd, _ = signal.cont2discrete((a, b, out, feedthrough), 1.0 / fs, method="zoh")
    num, den = signal.ss2tf(ad, bd, cd, dd)

    displacement = signal.lfilter(num[0], den, u)
    acceleration = signal.lfilter(num[1], den, u)
    if not (np.all(np.isfinite(displacement)) and np.all(np.isfinite(acceleration))):
        raise SimulationError("Non-finite SDOF response")
    return SdofResponse(displacement=displacement, acceleration=acceleration)


def welch_psd(samples: np.ndarray, fs: float) -> Tuple[np.ndarray, np.ndarray]:
    """Single-segment Hann Welch PSD (resolution fs / N).

    Raises:
        SimulationError: If the signal is too short, all zero or not finite.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise SimulationError("Signal too short for a PSD")
    if not np.all(np.isfinite(x)):
        raise SimulationError("Signal contains non-finite samples")
    if not np.any(x):
        raise SimulationError("Signal is identically zero")
    return signal.welch(x, fs=fs, window="hann", nperseg=x.size, noverlap=0)


def welch_dominant_frequency(samples: np.ndarray, params: ExcitationParams) -> float:
    """Frequency of the PSD peak inside the search band."""
    freqs, psd = welch_psd(samples, params.fs_hz)
    resolution = freqs[1] - freqs[0]
    if resolution > params.target_resolution_hz * 1.001:
        logger.debug("PSD resolution %.4g Hz is coarser than %.4g Hz", resolution, params.target_resolution_hz)
    low, high = params.search_band
    mask = (freqs >= low) & (freqs <= high)
    if not np.any(mask):
        raise SimulationError("No PSD bins inside the search band")
    return float(freqs[mask][np.argmax(psd[mask])])


def generate_acquisition(k: float, m: float, params: ExcitationParams, master_seed: int, index: int,
                         zeta: float = 0.05, noise: bool = False) -> AccelerationRecord:
    """Simulate one acquisition, retrying with fresh input until the frequency check passes.

    The input standard deviations are drawn once per acquisition; every retry
    draws new Gaussian sequences. The first candidate within ``params.tolerance``
    is accepted. Otherwise the candidate with the smallest error is returned
    with ``accepted=False``.

    Raises:
        SimulationError: Propagated from the simulator.
    """
    f_anal = analytical_frequency(k, m)
    c = 2.0 * zeta * np.sqrt(k * m)
    sigmas = ambient_sigmas(params, rng_for(master_seed, AMBIENT_SIGMA, index))
    warmup = params.warmup_samples
    n_total = params.n_samples + warmup

    best: Optional[Tuple[float, np.ndarray, float]] = None
    errors = []
    for attempt in range(params.max_simulations):
        ground = colored_input(params, rng_for(master_seed, AMBIENT_INPUT, index, attempt), sigmas, n_total)
        measurement = None
        if noise:
            measurement = params.noise_std * rng_for(master_seed, MEASUREMENT_NOISE, index, attempt).standard_normal(n_total)
        response = simulate_sdof(k, m, c, ground.total, params.fs_hz, measurement)
        samples = response.acceleration[warmup:]
        f_extr = welch_dominant_frequency(samples, params)
        error = abs(f_extr / f_anal - 1.0)
        errors.append(error)
        if best is None or error < best[0]:
            best = (error, samples, f_extr)
        if error <= params.tolerance:
            break

    error, samples, f_extr = best
    accepted = error <= params.tolerance
    if not accepted:
        logger.warning("Acquisition %d: no candidate within %.1f%% after %d simulations (best %.2f%%)",
                       index, 100 * params.tolerance, len(errors), 100 * error)
    peak = float(np.max(np.abs(samples)))
    if peak > params.comfort_limit:
        logger.debug("Acquisition %d: peak acceleration %.3g m/s² above comfort bound", index, peak)

    return AccelerationRecord(
        index=index,
        samples=samples,
        f_extracted=f_extr,
        f_analytical=f_anal,
        n_retries=len(errors),
        accepted=accepted,
        k=float(k),
        m=float(m),
        sigma_av=sigmas,
        attempt_errors=tuple(errors),
    )
