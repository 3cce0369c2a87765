"""Sensor fault injectors and the contamination scheduler."""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .dynamics import AccelerationRecord, welch_psd
from .models import BenchmarkError, FaultClass, FaultLabel, FaultPolicy
from .seeding import FAULT_APPLY, FAULT_PLAN, TARGET_SAMPLING, rng_for

logger = logging.getLogger(__name__)

HIGH_FREQUENCY_HZ = 25.0
LOW_FREQUENCY_HZ = (0.2, 2.0)


class FaultInjectionError(BenchmarkError, ValueError):
    """Raised for invalid fault windows, modes or infeasible contamination policies."""


class CableMode(str, Enum):
    TEMPORARY = "temporary"
    PERMANENT = "permanent"


@dataclass(frozen=True)
class FaultAssignment:
    """Plan entry for one contaminated acquisition.

    ``time_offset_s`` continues time-dependent faults (drift, permanent
    detachment) across the acquisitions of a run.
    """

    index: int
    fault_class: FaultClass
    params: Dict[str, float]
    start: int
    end: int
    run_id: int
    run_position: int
    time_offset_s: float = 0.0


@dataclass(frozen=True)
class ContaminationResult:
    records: Tuple[AccelerationRecord, ...]
    labels: Tuple[FaultLabel, ...]
    plan: Mapping[int, FaultAssignment] = field(default_factory=dict)


def _window(a: np.ndarray, start: int, end: Optional[int]) -> Tuple[np.ndarray, int, int]:
    out = np.array(a, dtype=float, copy=True)
    end = len(out) if end is None else end
    if not 0 <= start <= end <= len(out):
        raise FaultInjectionError(f"Fault window [{start}, {end}) outside signal of length {len(out)}")
    return out, start, end


def inject_drift(a: np.ndarray, s_d: float, start: int, end: Optional[int] = None, fs: float = 100.0,
                 length_s: float = 180.0, time_offset: float = 0.0) -> np.ndarray:
    """a + s_D exp(-τ / (l_s / 10)) + s_D on the window, τ measured from the window start."""
    out, start, end = _window(a, start, end)
    tau = np.arange(end - start) / fs + time_offset
    out[start:end] += s_d * np.exp(-tau / (length_s / 10.0)) + s_d
    return out


def inject_bias(a: np.ndarray, s_b: float, start: int, end: Optional[int] = None) -> np.ndarray:
    out, start, end = _window(a, start, end)
    out[start:end] += s_b
    return out


def inject_spikes(a: np.ndarray, s_s: float, count: int, rng: np.random.Generator, start: int = 0,
                  end: Optional[int] = None) -> np.ndarray:
    """Add ``s_s`` to ``count`` distinct random samples of the window."""
    out, start, end = _window(a, start, end)
    if count < 0 or count > end - start:
        raise FaultInjectionError(f"Cannot place {count} spikes in {end - start} samples")
    positions = rng.choice(np.arange(start, end), size=count, replace=False)
    out[positions] += s_s
    return out


def inject_gain(a: np.ndarray, s_g: float, start: int, end: Optional[int] = None) -> np.ndarray:
    out, start, end = _window(a, start, end)
    out[start:end] *= s_g
    return out


def inject_noise(a: np.ndarray, s_n: float, start: int, end: Optional[int], rng: np.random.Generator) -> np.ndarray:
    out, start, end = _window(a, start, end)
    out[start:end] += s_n * rng.standard_normal(end - start)
    return out


def inject_missing(a: np.ndarray, start: int, end: Optional[int] = None) -> np.ndarray:
    """Mark the window as missing (NaN)."""
    out, start, end = _window(a, start, end)
    out[start:end] = np.nan
    return out


def inject_cable_detachment(a: np.ndarray, s_c: float, f_c: float, lambda_c: float, start: int, mode,
                            duration: Optional[int] = None, fs: float = 100.0,
                            time_offset: float = 0.0) -> np.ndarray:
    """Replace the signal from ``start`` by s_C sin(2π f_C τ) exp(-λ_C τ).

    Temporary detachment restores the signal after ``duration`` samples;
    permanent detachment lasts to the end of the record.

    Raises:
        FaultInjectionError: For an unknown mode or a missing temporary duration.
    """
    try:
        mode = CableMode(mode)
    except ValueError as e:
        raise FaultInjectionError(f"Invalid cable detachment mode: {mode}") from e
    if mode is CableMode.TEMPORARY:
        if duration is None:
            raise FaultInjectionError("Temporary detachment needs a duration")
        end = min(len(a), start + duration)
    else:
        end = None
    out, start, end = _window(a, start, end)
    tau = np.arange(end - start) / fs + time_offset
    out[start:end] = s_c * np.sin(2 * np.pi * f_c * tau) * np.exp(-lambda_c * tau)
    return out


def _uniform(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    return float(rng.uniform(*bounds))


def _draw_parameters(fault_class: FaultClass, policy: FaultPolicy, rng: np.random.Generator,
                     fs: float, n_samples: int) -> Tuple[Dict[str, float], int, int]:
    """Parameters and window of the first acquisition of a run."""
    start = int(_uniform(rng, policy.window_start) * n_samples)
    end = n_samples
    if fault_class is FaultClass.DRIFT:
        params = {"s_D": _uniform(rng, policy.drift)}
    elif fault_class is FaultClass.BIAS:
        params = {"s_B": _uniform(rng, policy.bias)}
    elif fault_class is FaultClass.SPIKES:
        low, high = policy.spike_count_factor
        count = int(rng.integers(int(round(low * fs)), int(round(high * fs)) + 1))
        params = {"s_S": _uniform(rng, policy.spike), "count": float(count)}
        start = 0
    elif fault_class is FaultClass.GAIN:
        params = {"s_G": _uniform(rng, policy.gain)}
    elif fault_class is FaultClass.NOISE:
        params = {"s_N": _uniform(rng, policy.noise)}
    elif fault_class is FaultClass.MISSING:
        params = {}
        start = int(_uniform(rng, policy.missing_start) * n_samples)
    else:
        params = {
            "s_C": _uniform(rng, policy.cable_amplitude),
            "f_C": _uniform(rng, policy.cable_frequency),
            "lambda_C": _uniform(rng, policy.cable_decay),
        }
        if fault_class is FaultClass.CABLE_TEMPORARY:
            duration = int(round(_uniform(rng, policy.cable_duration_s) * fs))
            params["duration_s"] = duration / fs
            start = int(rng.integers(0, max(1, n_samples - duration)))
            end = min(n_samples, start + duration)
    return params, start, end


def sample_targets(indices: Sequence[int], target: int, master_seed: int) -> List[int]:
    """Random subset of ``target`` indices, returned in ascending order.

    Raises:
        FaultInjectionError: If the target exceeds the available indices.
    """
    if target > len(indices):
        raise FaultInjectionError(f"Cannot sample {target} acquisitions from {len(indices)}")
    rng = rng_for(master_seed, TARGET_SAMPLING)
    chosen = rng.choice(np.asarray(indices), size=target, replace=False)
    return sorted(int(i) for i in chosen)


def plan_contamination(indices: Sequence[int], policy: FaultPolicy, master_seed: int, fs: float = 100.0,
                       n_samples: int = 18000) -> Dict[int, FaultAssignment]:
    """Assign faults to acquisitions in a single deterministic pass.

    The budget ``floor(fraction * n)`` is split equally between the policy
    classes. Prolonged classes fill their share with runs of consecutive
    acquisitions, single-acquisition classes with isolated entries. Runs,
    singles and clean acquisitions are shuffled together and laid out in order.

    Raises:
        FaultInjectionError: If a class share cannot hold a single run.
    """
    n = len(indices)
    budget = int(np.floor(policy.fraction * n))
    if budget == 0 or not policy.classes:
        return {}
    share = budget // len(policy.classes)
    run_low, run_high = policy.run_length
    prolonged = [cls for cls in policy.classes if not cls.is_single_acquisition]
    if share < 1 or (prolonged and share < run_low):
        raise FaultInjectionError(
            f"Policy infeasible: {budget} contaminated acquisitions cannot hold one run per class"
        )

    rng = rng_for(master_seed, FAULT_PLAN)
    blocks: List[Tuple[Optional[FaultClass], int]] = []
    for cls in policy.classes:
        if cls.is_single_acquisition:
            blocks.extend((cls, 1) for _ in range(share))
            continue
        remaining = share
        while remaining >= run_low:
            length = int(rng.integers(run_low, min(run_high, remaining) + 1))
            blocks.append((cls, length))
            remaining -= length
    used = sum(length for _, length in blocks)
    blocks.extend((None, 1) for _ in range(n - used))

    plan: Dict[int, FaultAssignment] = {}
    position = 0
    for run_id, block in enumerate(rng.permutation(len(blocks))):
        cls, length = blocks[block]
        if cls is None:
            position += 1
            continue
        params, start, end = _draw_parameters(cls, policy, rng, fs, n_samples)
        elapsed = (n_samples - start) / fs
        for k in range(length):
            offset = 0.0 if k == 0 else elapsed + (k - 1) * n_samples / fs
            plan[int(indices[position + k])] = FaultAssignment(
                index=int(indices[position + k]),
                fault_class=cls,
                params=params,
                start=start if k == 0 else 0,
                end=end if k == 0 else n_samples,
                run_id=run_id,
                run_position=k,
                time_offset_s=offset,
            )
        position += length

    logger.info("Contamination plan: %d of %d acquisitions (budget %d)", len(plan), n, budget)
    return plan


def apply_fault(samples: np.ndarray, assignment: FaultAssignment, master_seed: int, fs: float = 100.0,
                length_s: float = 180.0) -> np.ndarray:
    """Apply one plan entry; random placements use the acquisition's own stream."""
    cls = assignment.fault_class
    p = assignment.params
    start, end = assignment.start, assignment.end
    rng = rng_for(master_seed, FAULT_APPLY, assignment.index)
    if cls is FaultClass.DRIFT:
        return inject_drift(samples, p["s_D"], start, end, fs, length_s, assignment.time_offset_s)
    if cls is FaultClass.BIAS:
        return inject_bias(samples, p["s_B"], start, end)
    if cls is FaultClass.SPIKES:
        return inject_spikes(samples, p["s_S"], int(p["count"]), rng, start, end)
    if cls is FaultClass.GAIN:
        return inject_gain(samples, p["s_G"], start, end)
    if cls is FaultClass.NOISE:
        return inject_noise(samples, p["s_N"], start, end, rng)
    if cls is FaultClass.MISSING:
        return inject_missing(samples, start, end)
    mode = CableMode.TEMPORARY if cls is FaultClass.CABLE_TEMPORARY else CableMode.PERMANENT
    return inject_cable_detachment(
        samples, p["s_C"], p["f_C"], p["lambda_C"], start, mode,
        duration=end - start, fs=fs, time_offset=assignment.time_offset_s,
    )


def fault_label(assignment: FaultAssignment, fs: float = 100.0) -> FaultLabel:
    return FaultLabel(
        index=assignment.index,
        fault_class=assignment.fault_class,
        params=dict(assignment.params),
        t_start=assignment.start / fs,
        t_end=assignment.end / fs,
        run_id=assignment.run_id,
        run_position=assignment.run_position,
    )


def contaminate_corpus(records: Sequence[AccelerationRecord], policy: FaultPolicy, master_seed: int,
                       fs: float = 100.0, length_s: float = 180.0) -> ContaminationResult:
    """Contaminate in-memory records according to a policy.

    With ``policy.target_count`` set, the records are first sampled down to
    that many acquisitions.
    """
    by_index = {record.index: record for record in records}
    indices = sorted(by_index)
    if policy.target_count is not None:
        indices = sample_targets(indices, policy.target_count, master_seed)
    n_samples = int(round(fs * length_s))
    plan = plan_contamination(indices, policy, master_seed, fs, n_samples)

    out = []
    for i in indices:
        record = by_index[i]
        if i in plan:
            samples = apply_fault(record.samples, plan[i], master_seed, fs, length_s)
            record = replace(record, samples=samples, fault_class=plan[i].fault_class)
        out.append(record)
    labels = tuple(fault_label(plan[i], fs) for i in sorted(plan))
    return ContaminationResult(records=tuple(out), labels=labels, plan=plan)


def _band_mass(samples: np.ndarray, fs: float, low: float, high: float) -> float:
    freqs, psd = welch_psd(np.nan_to_num(samples), fs)
    mask = (freqs >= low) & (freqs <= high)
    return float(np.sum(psd[mask]) * (freqs[1] - freqs[0]))


def fault_statistic(fault_class: FaultClass, samples: np.ndarray, fs: float = 100.0) -> float:
    """Scalar feature that grows when ``fault_class`` contaminates a record."""
    x = np.asarray(samples, dtype=float)
    if fault_class in (FaultClass.DRIFT, FaultClass.BIAS):
        return float(abs(np.nanmean(x)))
    if fault_class is FaultClass.SPIKES:
        return float(np.nanmax(np.abs(x)))
    if fault_class is FaultClass.GAIN:
        return float(np.sqrt(np.nanmean(x**2)))
    if fault_class is FaultClass.NOISE:
        return _band_mass(x, fs, HIGH_FREQUENCY_HZ, fs / 2)
    if fault_class is FaultClass.MISSING:
        return float(np.count_nonzero(np.isnan(x)))
    return _band_mass(x, fs, *LOW_FREQUENCY_HZ) / _band_mass(x, fs, 0.0, fs / 2)


SEPARATION_FACTORS = {
    FaultClass.DRIFT: 2.0,
    FaultClass.BIAS: 2.0,
    FaultClass.SPIKES: 2.0,
    FaultClass.GAIN: 1.01,
    FaultClass.NOISE: 10.0,
    FaultClass.MISSING: 1.0,
    FaultClass.CABLE_TEMPORARY: 2.0,
    FaultClass.CABLE_PERMANENT: 2.0,
}


def is_separable(fault_class: FaultClass, clean: np.ndarray, contaminated: np.ndarray, fs: float = 100.0) -> bool:
    """Whether the class statistic of the contaminated record clears the clean one."""
    clean_value = fault_statistic(fault_class, clean, fs)
    dirty_value = fault_statistic(fault_class, contaminated, fs)
    if fault_class is FaultClass.MISSING:
        return dirty_value > clean_value
    return dirty_value > SEPARATION_FACTORS[fault_class] * clean_value
