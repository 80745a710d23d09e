import numpy as np
from rich import box
from rich.console import Console
from rich.table import Table

from bandtest.band.builder import BandWidthProfile
from bandtest.core.arrays import FloatArray
from bandtest.simulation.experiments import NormalityStudyRow, RocExperimentResult

# Summaries go to stderr; stdout carries CSV only.
console = Console(stderr=True)


def create_roc_summary_table(results: list[RocExperimentResult]) -> Table:
    """
    Create a rich table summarizing ROC experiments.

    Args:
        results: One entry per test that was swept

    Returns:
        A Rich Table object
    """
    table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    table.add_column("Test", style="cyan", no_wrap=True)
    table.add_column("AUC", justify="right")
    table.add_column("Flipped")
    table.add_column("Seed", justify="right", style="blue")
    table.add_column("Trials", justify="right", style="blue")

    for result in results:
        flipped = "[yellow]yes[/]" if result.curve.flipped else "no"
        table.add_row(result.test, f"{result.curve.auc:.4f}", flipped, str(result.seed), str(result.trials))

    return table


def create_normality_table(rows: list[NormalityStudyRow]) -> Table:
    """
    Create a rich table comparing stationary and nonstationary normality statistics.

    Args:
        rows: One entry per sample size

    Returns:
        A Rich Table object
    """
    table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    table.add_column("Size", justify="right", style="cyan")
    table.add_column("Median (stationary)", justify="right")
    table.add_column("Median (nonstationary)", justify="right")
    table.add_column("KS distance", justify="right")

    for row in rows:
        distance = row.distance
        style = "red" if distance > 0.2 else "green"
        table.add_row(
            str(row.size),
            f"{_median(row.stationary):.4f}",
            f"{_median(row.nonstationary):.4f}",
            f"[{style}]{distance:.4f}[/]",
        )

    return table


def _median(values: FloatArray) -> float:
    return float(np.median(values))


def display_roc_summary(results: list[RocExperimentResult]) -> None:
    console.print(create_roc_summary_table(results))


def display_normality_study(rows: list[NormalityStudyRow]) -> None:
    console.print(create_normality_table(rows))


def display_band_summary(profile: BandWidthProfile) -> None:
    """Print the number of knots and the largest width of a band."""
    console.print(f"Band with [bold cyan]{profile.knots.size}[/] knots, max width [bold]{profile.max_width:.4f}[/]")
