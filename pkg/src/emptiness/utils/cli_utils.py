"""
Emptiness CLI Utilities

Banner, status lines and result tables for the command-line interface.
Everything here prints to stderr; stdout is reserved for CSV and JSON.
"""

from typing import Any, Dict, Iterable, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .. import __version__

console = Console(stderr=True)


def print_banner():
    """Print the emptiness application banner."""
    banner_text = f"""
Emptiness - XXZ emptiness formation probability toolkit

    Exact diagonalization, loop Monte Carlo and six-vertex transfer matrices

    Version: {__version__}
    """
    console.print(Panel(
        banner_text,
        title="[bold blue]emptiness[/bold blue]",
        border_style="blue",
        padding=(1, 2)
    ))


def print_results_table(title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]):
    """
    Print rows under ``columns`` in a rich table.

    Args:
        title: Table title
        columns: Column headers; the first is styled as a key column
        rows: Row values, converted with ``str``
    """
    table = Table(title=title)
    for index, column in enumerate(columns):
        table.add_column(column, style="cyan" if index == 0 else "green", no_wrap=index == 0)
    for row in rows:
        table.add_row(*("" if value is None else str(value) for value in row))
    console.print(table)


def print_metrics(title: str, metrics: Dict[str, Any]):
    """Print a two-column Metric / Value table."""
    print_results_table(title, ["Metric", "Value"], metrics.items())


def print_panel(body: str, title: str, style: str = "blue"):
    console.print(Panel(body, title=f"[bold {style}]{title}[/bold {style}]", border_style=style))


def print_success(message: str):
    """Print a success message."""
    console.print(f"✅ {message}", style="green")


def print_error(message: str):
    """Print an error message."""
    console.print(f"❌ {message}", style="red")


def print_warning(message: str):
    """Print a warning message."""
    console.print(f"⚠️ {message}", style="yellow")


def print_info(message: str):
    """Print an info message."""
    console.print(f"ℹ️ {message}", style="blue")
