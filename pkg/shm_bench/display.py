"""Display and formatting utilities for the benchmark CLI."""

import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable

from rich.console import Console
from rich.table import Table

from .models import AppConfig, ScenarioConfig

console = Console()


def _jsonable(value: Any) -> Any:
    if is_dataclass(value):
        return {key: _jsonable(item) for key, item in asdict(value).items()}
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value"):
        return value.value
    return value


def print_json(payload: Any) -> None:
    """Print any summary or report as JSON on stdout."""
    console.print_json(json.dumps(_jsonable(payload)))


def print_generation_summary(summaries: Iterable) -> None:
    table = Table(title="Generated sub-datasets")
    table.add_column("Code", style="cyan")
    table.add_column("Written", style="magenta", justify="right")
    table.add_column("Catalogue", style="yellow", justify="right")
    table.add_column("Rejected", style="red", justify="right")
    table.add_column("Contaminated", style="blue", justify="right")
    table.add_column("Time (s)", style="green", justify="right")

    for summary in summaries:
        table.add_row(
            summary.code.value,
            str(summary.realized_count),
            str(summary.expected_count),
            str(summary.rejected_count),
            str(summary.contaminated_count),
            f"{summary.elapsed_s:.1f}",
        )

    console.print(table)


def print_contamination_summary(summary) -> None:
    console.print(f"\n[bold green]Contaminated {summary.directory}[/bold green]")
    console.print(f"Processed: {summary.processed_count}")
    console.print(f"Contaminated: {summary.contaminated_count}")
    console.print(f"[dim]Labels: {summary.labels_path}[/dim]")


def print_file_report(report) -> None:
    """Format a single-acquisition report."""
    console.print(f"\n[bold green]Acquisition {report.name}[/bold green]")

    table = Table()
    table.add_column("Property", style="cyan")
    table.add_column("Value", style="magenta")

    table.add_row("Index", str(report.index))
    table.add_row("Samples", f"{report.n_samples} at {report.fs:g} Hz")
    table.add_row("Units", report.units)
    table.add_row("Extracted frequency", _fmt_hz(report.f_extracted))
    table.add_row("Analytical frequency", _fmt_hz(report.f_analytical))
    if report.relative_error is not None:
        table.add_row("Relative error", f"{report.relative_error:.2%}")
    table.add_row("Accepted", "-" if report.accepted is None else str(report.accepted))
    table.add_row("Fault", report.fault_class or "-")
    table.add_row("Missing samples", str(report.missing_samples))

    console.print(table)


def _fmt_hz(value) -> str:
    return "-" if value is None else f"{value:.4f} Hz"


def print_corpus_report(report) -> None:
    """Format a sub-dataset directory report, problems first."""
    status = "[green]OK[/green]" if report.ok else "[red]FAILED[/red]"
    console.print(f"\n[bold]{report.code}[/bold] in {report.directory}: {status}")

    table = Table()
    table.add_column("Check", style="cyan")
    table.add_column("Value", style="magenta")
    table.add_row("Files on disk", str(report.file_count))
    table.add_row("Manifest entries", str(report.manifest_count))
    table.add_row("Catalogue count", str(report.catalogue_count))
    table.add_row("Rejected", str(report.rejected_count))
    for fault_class, count in sorted(report.fault_counts.items()):
        table.add_row(f"Fault {fault_class}", str(count))
    console.print(table)

    for problem in report.problems:
        console.print(f"  [red]•[/red] {problem}")


def print_scenario(scenario: ScenarioConfig) -> None:
    grid = scenario.grid
    console.print("[bold green]Scenario[/bold green]")
    table = Table()
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="magenta")
    table.add_row("Grid", f"{grid.start_date} + {grid.n_years} y ({grid.n_acquisitions} acquisitions)")
    table.add_row("Master seed", str(scenario.master_seed))
    table.add_row("Workers", str(scenario.n_workers))
    table.add_row("Sampling", f"{scenario.excitation.fs_hz:g} Hz x {scenario.excitation.length_s:g} s")
    table.add_row("Measurement noise", str(scenario.measurement_noise))
    console.print(table)


def format_config_display(current_config: AppConfig, config_info: Dict[str, Any]) -> None:
    """Format and display configuration information."""
    console.print("[bold green]Current Configuration[/bold green]")

    config_table = Table()
    config_table.add_column("Setting", style="cyan")
    config_table.add_column("Value", style="magenta")

    config_table.add_row("Default Workers", str(current_config.default_workers or "scenario"))
    config_table.add_row("Default Seed", str(current_config.default_seed))
    config_table.add_row("Output Directory", current_config.output_dir)
    config_table.add_row("Output Format", current_config.output_format.value)
    config_table.add_row("Verbose", str(current_config.verbose))

    console.print(config_table)

    console.print("\n[bold blue]Configuration Files[/bold blue]")
    console.print(f"Config Dir: {config_info['config_dir']}")
    console.print(f"Config File: {config_info['config_file']} "
                  f"({'exists' if config_info['config_exists'] else 'missing'})")
    console.print(f"Scenario File: {config_info['scenario_file']} "
                  f"({'exists' if config_info['scenario_exists'] else 'missing'})")


def print_success(message: str) -> None:
    console.print(f"[green]{message}[/green]")


def print_error(message: str) -> None:
    """Print an error message."""
    console.print(f"[red]Error:[/red] {message}")
