"""
Emptiness Reporting Module

Machine-readable emission of run results: CSV with a header comment naming
the route and units, or JSON. Scans append their fit as a ``# fit:`` footer
line. Rows are any objects with a ``to_dict()`` holding the CSV columns.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import click
from loguru import logger

from ..core.config import FORMATS, Config
from ..core.errors import ValidationError


CSV_COLUMNS = ["L", "efp", "stderr", "route", "delta", "beta", "n", "d", "seed", "wall_ms"]
UNITS = {"efp": "dimensionless", "wall_ms": "milliseconds"}


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ReportGenerator:
    """
    Renders EFP tables, scan fits and verification summaries.

    Output is a pure function of the rows and the thread count, so identical
    runs produce identical bytes.
    """

    def __init__(self, config: Config):
        """
        Initialize the report generator.

        Args:
            config: Configuration object
        """
        self.config = config

    @property
    def threads(self) -> int:
        return int(self.config.general.threads)

    def header(self, route: str) -> str:
        units = ", ".join(f"{column} {unit}" for column, unit in UNITS.items())
        return f"# route={route} threads={self.threads} units: {units}"

    def render_csv(self, rows: Iterable[Any], route: str, fit: Optional[Dict[str, Any]] = None) -> str:
        buffer = io.StringIO()
        buffer.write(self.header(route) + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            data = row.to_dict()
            writer.writerow([_cell(data.get(column)) for column in CSV_COLUMNS])
        if fit is not None:
            buffer.write(f"# fit: {json.dumps(fit, sort_keys=True, default=_json_default)}\n")
        return buffer.getvalue()

    def render_json(self, rows: Iterable[Any], route: str, fit: Optional[Dict[str, Any]] = None) -> str:
        document: Dict[str, Any] = {
            "route": route,
            "threads": self.threads,
            "units": UNITS,
            "rows": [{column: row.to_dict().get(column) for column in CSV_COLUMNS} for row in rows],
        }
        if fit is not None:
            document["fit"] = dict(sorted(fit.items()))
        # rows keep the CSV column order
        return json.dumps(document, indent=2, default=_json_default) + "\n"

    def render(
        self,
        rows: List[Any],
        route: str,
        fmt: str = "csv",
        fit: Optional[Dict[str, Any]] = None
    ) -> str:
        """
        Render result rows in ``fmt``.

        Args:
            rows: EFP rows
            route: Route name for the header
            fmt: ``csv`` or ``json``
            fit: Optional fit parameters appended as footer or ``fit`` key

        Returns:
            The rendered document
        """
        if fmt not in FORMATS:
            raise ValidationError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")
        if fmt == "json":
            return self.render_json(rows, route, fit)
        return self.render_csv(rows, route, fit)

    def render_summary(self, summary: Dict[str, Any]) -> str:
        return json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n"

    def write(self, text: str, output: Optional[str] = None):
        """Write ``text`` to ``output`` or, when none is given, to stdout."""
        if output is None:
            click.echo(text, nl=False)
            return
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Results written to: {path}")
