"""Rich tables and progress bars for experiment results."""
from contextlib import contextmanager
from typing import Callable, Iterator, Sequence

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table
from scipy.stats import norm

from ...harness.records import BerRecord, CorrSnapshot, HistogramResult, IterationBerRecord

console = Console()


@contextmanager
def trial_progress(description: str, enabled: bool = True) -> Iterator[Callable[[int, int], None]]:
    """Progress bar over Monte-Carlo trials; yields the engine's progress callback."""
    if not enabled:
        yield lambda done, total: None
        return
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(f"[cyan]{description}", total=None)

        def update(done: int, total: int) -> None:
            progress.update(task, completed=done, total=total)

        yield update


def _sci(value: float) -> str:
    return f"{value:.3e}"


def display_ber_records(records: Sequence[BerRecord], title: str = "BER") -> None:
    """Display BER records in a formatted table."""
    if not records:
        console.print("[yellow]No results.[/yellow]")
        return

    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Algorithm", style="cyan")
    table.add_column("rho", justify="right")
    table.add_column("Es/N0 (dB)", justify="right")
    table.add_column("BER", justify="right", style="green")
    table.add_column("95% CI", justify="right")
    table.add_column("Errors / bits", justify="right")
    table.add_column("Trials", justify="right")
    table.add_column("Diverged", justify="right")

    for rec in records:
        table.add_row(
            rec.algorithm, f"{rec.rho:g}", f"{rec.esn0_db:g}", _sci(rec.ber),
            f"[{_sci(rec.ci95_low)}, {_sci(rec.ci95_high)}]",
            f"{rec.bit_errors}/{rec.bits}", str(rec.trials),
            f"[red]{rec.diverged_trials}[/red]" if rec.diverged_trials else "0",
        )
    console.print(table)


def display_iteration_records(records: Sequence[IterationBerRecord], title: str = "BER per iteration") -> None:
    """Show the prior row, the best iteration and the final iteration of every curve."""
    if not records:
        console.print("[yellow]No results.[/yellow]")
        return

    curves: dict = {}
    for rec in records:
        curves.setdefault((rec.algorithm, rec.rho, rec.esn0_db, rec.T), []).append(rec)

    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Algorithm", style="cyan")
    table.add_column("rho", justify="right")
    table.add_column("Es/N0 (dB)", justify="right")
    table.add_column("T", justify="right")
    table.add_column("BER t=0", justify="right")
    table.add_column("Best t", justify="right")
    table.add_column("Best BER", justify="right", style="green")
    table.add_column("BER t=T", justify="right")

    for (label, rho, esn0, T), curve in curves.items():
        best = min(curve[1:] or curve, key=lambda r: (r.ber, r.t))
        table.add_row(label, f"{rho:g}", f"{esn0:g}", str(T), _sci(curve[0].ber),
                      str(best.t), _sci(best.ber), _sci(curve[-1].ber))
    console.print(table)


def display_corr_snapshots(snapshots: Sequence[CorrSnapshot]) -> None:
    if not snapshots:
        console.print("[yellow]No results.[/yellow]")
        return

    table = Table(title="Effective-noise correlation", show_header=True, header_style="bold magenta")
    table.add_column("Algorithm", style="cyan")
    table.add_column("rho", justify="right")
    table.add_column("Es/N0 (dB)", justify="right")
    table.add_column("t", justify="right")
    table.add_column("Trials", justify="right")
    table.add_column("mean |Gamma_ij|, i != j", justify="right", style="green")
    table.add_column("|Gamma_i,i+1|", justify="right")

    for snap in snapshots:
        band = snap.band
        table.add_row(snap.algorithm, f"{snap.rho:g}", f"{snap.esn0_db:g}", str(snap.t), str(snap.trials),
                      f"{snap.mean_offdiag:.4f}", f"{band[1]:.4f}" if band.size > 1 else "-")
    console.print(table)


def display_histograms(results: Sequence[HistogramResult]) -> None:
    if not results:
        console.print("[yellow]No results.[/yellow]")
        return

    table = Table(title="Belief residual tails", show_header=True, header_style="bold magenta")
    table.add_column("Algorithm", style="cyan")
    table.add_column("rho", justify="right")
    table.add_column("Es/N0 (dB)", justify="right")
    table.add_column("t", justify="right")
    table.add_column("Residuals", justify="right")
    for k in (3, 4, 5):
        table.add_column(f"> {k} sigma", justify="right")
    table.add_column("Gaussian > 4 sigma", justify="right", style="dim")

    ideal = 2.0 * norm.sf(4.0)
    for res in results:
        hist = res.histogram
        table.add_row(res.algorithm, f"{res.rho:g}", f"{res.esn0_db:g}", str(res.t), str(hist.total),
                      *[_sci(hist.tail_fraction(k)) for k in (3, 4, 5)], _sci(ideal))
    console.print(table)


def display_output(prefix: str) -> None:
    console.print(f"[green]✓ Results written with prefix {prefix}[/green]")
