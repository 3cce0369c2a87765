"""Static figures of the generated series (write-only, Agg backend)."""

import logging
from enum import Enum
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .dynamics import colored_input, generate_acquisition, welch_psd  # noqa: E402
from .environment import youngs_modulus  # noqa: E402
from .faults import apply_fault, plan_contamination  # noqa: E402
from .models import EnvParams, ExcitationParams, FaultClass, FaultPolicy, ScenarioConfig  # noqa: E402
from .pipeline import ALL_CODES, build_km_matrix, deflection_series, realized_for  # noqa: E402
from .scenario import RealizedScenario, realize_scenario  # noqa: E402
from .seeding import AMBIENT_INPUT, rng_for  # noqa: E402

logger = logging.getLogger(__name__)


class PlotSelector(str, Enum):
    LOAD = "load"
    MODULUS = "modulus"
    SPECTRUM = "spectrum"
    DEFLECTION = "deflection"
    FAULTS = "faults"
    ALL = "all"


def plot_load_history(realized: RealizedScenario) -> Figure:
    """Sustained, intermittent and total live load over the grid."""
    hours = np.arange(len(realized.load))
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(hours, realized.load.p_q, label="p_Q")
    ax.plot(hours, realized.load.p_q_lt, label="p_Q,lt", linewidth=0.8)
    ax.plot(hours, realized.load.p_q_st, label="p_Q,st", linewidth=0.8)
    ax.set_xlabel("Acquisition index (h)")
    ax.set_ylabel("Live load (kN/m)")
    ax.legend(loc="upper right")
    fig.tight_layout()
    return fig


def plot_youngs_modulus(params: EnvParams, t_min: float = -20.0, t_max: float = 60.0) -> Figure:
    temperature = np.linspace(t_min, t_max, 161)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(temperature, youngs_modulus(temperature, params) / 1e3)
    ax.set_xlabel("Temperature (°C)")
    ax.set_ylabel("E (GPa)")
    fig.tight_layout()
    return fig


def plot_input_spectrum(params: ExcitationParams, master_seed: int, index: int = 0) -> Figure:
    """PSD of one ambient input realization, split by component."""
    ground = colored_input(params, rng_for(master_seed, AMBIENT_INPUT, index))
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, component in (("human", ground.human), ("traffic", ground.traffic), ("total", ground.total)):
        freqs, psd = welch_psd(component, params.fs_hz)
        ax.semilogy(freqs, psd, label=label)
    ax.set_xlim(0, params.fs_hz / 2)
    ax.set_xlabel("Frequency (Hz)")
    ax.set_ylabel("PSD ((m/s²)²/Hz)")
    ax.legend()
    fig.tight_layout()
    return fig


def plot_deflection_history(base: ScenarioConfig) -> Figure:
    """Midspan deflection of every damage sub-dataset on the shared grid."""
    fig, ax = plt.subplots(figsize=(10, 4))
    hours = np.arange(base.grid.n_acquisitions)
    for code in ALL_CODES:
        if code.value in ("D4", "D5"):
            continue
        ax.plot(hours, deflection_series(realized_for(code, base)), label=code.value, linewidth=0.7)
    ax.set_xlabel("Acquisition index (h)")
    ax.set_ylabel("Midspan deflection (mm)")
    ax.legend(loc="upper left", ncol=4, fontsize="small")
    fig.tight_layout()
    return fig


def plot_fault_exemplars(base: ScenarioConfig, index: int = 0, policy: Optional[FaultPolicy] = None) -> Figure:
    """One contaminated copy of acquisition ``index`` per fault class, in time and frequency."""
    excitation = base.excitation
    policy = policy or FaultPolicy()
    km = build_km_matrix(realize_scenario(base))
    clean = generate_acquisition(km.k[index], km.m[index], excitation, base.master_seed, index, base.beam.zeta)
    time_axis = np.arange(excitation.n_samples) / excitation.fs_hz

    classes = list(FaultClass)
    fig, axes = plt.subplots(len(classes) + 1, 2, figsize=(10, 2 * (len(classes) + 1)), squeeze=False)
    rows = [("clean", clean.samples)]
    for cls in classes:
        single = policy.model_copy(update={"classes": (cls,), "fraction": 1.0, "target_count": None})
        span = policy.run_length[1]
        plan = plan_contamination(list(range(span)), single, base.master_seed, excitation.fs_hz, excitation.n_samples)
        assignment = next(entry for entry in plan.values() if entry.run_position == 0)
        rows.append((cls.value, apply_fault(clean.samples, assignment, base.master_seed, excitation.fs_hz,
                                            excitation.length_s)))

    for (label, samples), (ax_time, ax_freq) in zip(rows, axes):
        ax_time.plot(time_axis, samples, linewidth=0.5)
        ax_time.set_ylabel(label)
        finite = np.nan_to_num(samples)
        if np.any(finite):
            freqs, psd = welch_psd(finite, excitation.fs_hz)
            ax_freq.semilogy(freqs, psd, linewidth=0.5)
    axes[-1][0].set_xlabel("Time (s)")
    axes[-1][1].set_xlabel("Frequency (Hz)")
    fig.tight_layout()
    return fig


def render_plots(selector: PlotSelector, base: ScenarioConfig, out_dir: Path, fmt: str = "png") -> List[Path]:
    """Save the selected figures as ``<name>.<fmt>`` under ``out_dir``."""
    selector = PlotSelector(selector)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    builders = {
        PlotSelector.LOAD: lambda: plot_load_history(realize_scenario(base)),
        PlotSelector.MODULUS: lambda: plot_youngs_modulus(base.env_params),
        PlotSelector.SPECTRUM: lambda: plot_input_spectrum(base.excitation, base.master_seed),
        PlotSelector.DEFLECTION: lambda: plot_deflection_history(base),
        PlotSelector.FAULTS: lambda: plot_fault_exemplars(base),
    }
    chosen = [s for s in builders if selector is PlotSelector.ALL or s is selector]
    written = []
    for item in chosen:
        fig = builders[item]()
        path = out_dir / f"{item.value}.{fmt}"
        fig.savefig(path, format=fmt, dpi=150)
        plt.close(fig)
        logger.info("Wrote %s", path)
        written.append(path)
    return written
