"""Command-line interface for the beam SHM benchmark generator."""

import logging
from pathlib import Path
from typing import Any, Callable, List, Optional

import typer
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from .config import get_config_manager, load_config_with_env, save_scenario
from .display import (
    format_config_display,
    print_contamination_summary,
    print_corpus_report,
    print_file_report,
    print_generation_summary,
    print_json,
    print_scenario,
    print_success,
)
from .error_handling import handle_cli_error, safe_bool_conversion, safe_int_conversion, setup_logging
from .models import FaultPolicy, OutputFormat, SubDatasetCode
from .pipeline import (
    ALL_CODES,
    contaminate_directory,
    fits_grid,
    generate_corpus,
    inspect_corpus,
    inspect_file,
    select_indices,
    subdataset_spec,
)
from .plotting import PlotSelector, render_plots

app = typer.Typer(
    name="shm-bench",
    help="Synthetic vibration-monitoring benchmark for a corroding, damaged steel beam",
    add_completion=False,
)

console = Console()


@app.callback()
def main_options(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Warnings and errors only"),
) -> None:
    """Generate, contaminate, inspect and plot the benchmark corpus."""
    level = logging.INFO
    if verbose or load_config_with_env().verbose:
        level = logging.DEBUG
    if quiet:
        level = logging.WARNING
    setup_logging(level)


def _progress(disable: bool) -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        disable=disable,
    )


def _use_json(json_output: bool) -> bool:
    return json_output or load_config_with_env().output_format is OutputFormat.JSON


@app.command()
@handle_cli_error
def generate(
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario JSON file"),
    subdatasets: Optional[List[str]] = typer.Option(None, "--subdataset", "-s",
                                                    help="Sub-dataset code (repeatable, default: all)"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Corpus root directory"),
    start: Optional[int] = typer.Option(None, "--start", help="First grid index to generate"),
    stop: Optional[int] = typer.Option(None, "--stop", help="Grid index to stop before"),
    json_output: bool = typer.Option(False, "--json", "-j", help="Machine-readable report"),
) -> None:
    """Generate acquisitions, inputs and labels for the selected sub-datasets."""
    config = load_config_with_env()
    base = get_config_manager().load_scenario(config_path)

    # Flags override preferences, preferences override the scenario document
    seed = seed if seed is not None else config.default_seed
    updates: dict = {"n_workers": workers or config.default_workers or base.n_workers}
    if seed is not None:
        updates["master_seed"] = seed
    base = base.model_copy(update=updates)
    if base.n_workers <= 0:
        raise ValueError("Workers must be a positive number")

    codes = [SubDatasetCode(code) for code in subdatasets] if subdatasets else list(ALL_CODES)
    out_root = out or Path(config.output_dir)
    indices = None
    if start is not None or stop is not None:
        first = start or 0
        last = stop if stop is not None else base.grid.n_acquisitions
        if not 0 <= first < last <= base.grid.n_acquisitions:
            raise ValueError(f"Index range [{first}, {last}) outside the grid of {base.grid.n_acquisitions}")
        indices = range(first, last)

    use_json = _use_json(json_output)
    total = sum(len(select_indices(subdataset_spec(code, base.grid), base.master_seed, indices))
                for code in codes if fits_grid(code, base.grid))
    with _progress(use_json) as progress:
        task = progress.add_task("Generating acquisitions", total=total)
        summaries = generate_corpus(base, codes, out_root, indices, base.n_workers,
                                    lambda n: progress.advance(task, n))

    if use_json:
        print_json(summaries)
    else:
        print_generation_summary(summaries)
        print_success(f"Corpus written to {out_root}")


@app.command()
@handle_cli_error
def contaminate(
    corpus: Path = typer.Argument(..., help="Sub-dataset directory holding clean acquisitions"),
    policy_path: Optional[Path] = typer.Option(None, "--policy", "-p", help="Fault policy JSON file"),
    code: SubDatasetCode = typer.Option(SubDatasetCode.D4, "--code", help="Sub-dataset code of the copies"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    json_output: bool = typer.Option(False, "--json", "-j", help="Machine-readable report"),
) -> None:
    """Inject sensor faults into copies of an existing sub-dataset."""
    if not corpus.is_dir():
        raise FileNotFoundError(f"Corpus directory not found: {corpus}")
    if policy_path is not None:
        if not policy_path.exists():
            raise FileNotFoundError(f"Policy file not found: {policy_path}")
        policy = FaultPolicy.model_validate_json(policy_path.read_text(encoding="utf-8"))
    else:
        policy = FaultPolicy()

    config = load_config_with_env()
    master_seed = seed if seed is not None else config.default_seed
    if master_seed is None:
        master_seed = get_config_manager().load_scenario().master_seed
    out_dir = out or corpus.parent / f"{corpus.name}-contaminated"

    use_json = _use_json(json_output)
    total = len(list(corpus.glob("acc*.h5")))
    with _progress(use_json) as progress:
        task = progress.add_task("Contaminating", total=total)
        summary = contaminate_directory(corpus, out_dir, policy, master_seed, code,
                                        lambda n: progress.advance(task, n))

    if use_json:
        print_json(summary)
    else:
        print_contamination_summary(summary)


@app.command()
@handle_cli_error
def inspect(
    target: Path = typer.Argument(..., help="Acquisition file or sub-dataset directory"),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario JSON file"),
    json_output: bool = typer.Option(False, "--json", "-j", help="Machine-readable report"),
) -> None:
    """Report on one acquisition or check a sub-dataset against its manifest."""
    if not target.exists():
        raise FileNotFoundError(f"Not found: {target}")
    base = get_config_manager().load_scenario(config_path)
    use_json = _use_json(json_output)

    if target.is_dir():
        report: Any = inspect_corpus(target, base.grid)
        failed = not report.ok
        render: Callable[[Any], None] = print_corpus_report
    else:
        report = inspect_file(target)
        tolerance = base.excitation.tolerance
        failed = bool(report.accepted and report.fault_class is None and report.relative_error is not None
                      and report.relative_error > tolerance)
        render = print_file_report

    if use_json:
        print_json({"ok": not failed, "report": report})
    else:
        render(report)
    if failed:
        raise typer.Exit(1)


@app.command()
@handle_cli_error
def plot(
    selector: PlotSelector = typer.Argument(PlotSelector.ALL, help="Series to plot"),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="Scenario JSON file"),
    out: Path = typer.Option(Path("figures"), "--out", "-o", help="Output directory"),
    fmt: str = typer.Option("png", "--format", "-f", help="png or svg"),
) -> None:
    """Write static figures of the generated series."""
    if fmt not in ("png", "svg"):
        raise ValueError(f"Unsupported format '{fmt}', use png or svg")
    base = get_config_manager().load_scenario(config_path)
    for path in render_plots(selector, base, out, fmt):
        print_success(f"Wrote {path}")


@app.command()
@handle_cli_error
def config(
    show: bool = typer.Option(False, "--show", "-s", help="Show current configuration"),
    reset: bool = typer.Option(False, "--reset", "-r", help="Reset to default configuration"),
    set_key: Optional[str] = typer.Option(None, "--set", help="Set configuration key"),
    value: Optional[str] = typer.Option(None, "--value", help="Value to set"),
    write_scenario: Optional[Path] = typer.Option(None, "--write-scenario",
                                                  help="Write the active scenario as JSON to this path"),
    import_path: Optional[Path] = typer.Option(None, "--import", help="Replace preferences with a JSON file"),
    export_path: Optional[Path] = typer.Option(None, "--export", help="Write current preferences to a JSON file"),
) -> None:
    """Manage preferences and scenario documents."""
    config_manager = get_config_manager()

    if reset:
        if typer.confirm("Are you sure you want to reset configuration to defaults?"):
            config_manager.reset_config()
            print_success("Configuration reset to defaults.")
        return

    if import_path is not None:
        imported = config_manager.import_config(import_path)
        format_config_display(imported, config_manager.get_config_info())
        print_success(f"Configuration imported from {import_path}")
        return

    if export_path is not None:
        config_manager.export_config(export_path)
        print_success(f"Configuration exported to {export_path}")
        return

    if write_scenario is not None:
        scenario = config_manager.load_scenario()
        save_scenario(scenario, write_scenario)
        print_scenario(scenario)
        print_success(f"Scenario written to {write_scenario}")
        return

    if set_key and value:
        _update_config_value(config_manager, set_key, value)
        return

    if show or (not set_key and not value):
        format_config_display(config_manager.load_config(), config_manager.get_config_info())


def _update_config_value(config_manager: Any, set_key: str, value: str) -> None:
    valid_keys = ["default_workers", "default_seed", "output_dir", "output_format", "verbose"]

    if set_key not in valid_keys:
        raise ValueError(f"Invalid configuration key. Valid keys: {', '.join(valid_keys)}")

    converted_value = _convert_config_value(set_key, value)
    config_manager.update_config(**{set_key: converted_value})
    print_success(f"Configuration updated: {set_key} = {converted_value}")


def _convert_config_value(set_key: str, value: str) -> Any:
    """Convert string value to appropriate type for configuration."""
    if set_key in ("default_workers", "default_seed"):
        return safe_int_conversion(value, set_key) if value != "null" else None
    elif set_key == "verbose":
        return safe_bool_conversion(value)
    elif set_key == "output_format":
        return OutputFormat(value)
    return value


@app.command()
def version() -> None:
    """Show version information."""
    from . import __version__
    console.print(f"shm-bench version {__version__}")


def main():
    app()


if __name__ == "__main__":
    main()
