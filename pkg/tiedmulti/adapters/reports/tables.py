"""Report writers: aligned text via rich, CSV for machines, JSON for provenance."""

import csv
import io
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel
from rich import box
from rich.console import Console
from rich.table import Table

from tiedmulti.utils.exceptions import TiedMultiError

TEXT_WIDTH = 160


@dataclass
class ReportTable:
    """A titled grid of pre-formatted cells."""

    title: str
    headers: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def add_row(self, *cells: object) -> None:
        if len(cells) != len(self.headers):
            raise TiedMultiError(
                f"row of {len(cells)} cells for table {self.title!r} "
                f"with {len(self.headers)} columns"
            )
        self.rows.append([str(c) for c in cells])

    def to_rich(self) -> Table:
        table = Table(title=self.title, box=box.SIMPLE, title_justify="left")
        for header in self.headers:
            table.add_column(header, justify="left" if header in ("kind", "model") else "right")
        for row in self.rows:
            table.add_row(*row)
        return table


def render_text(tables: Sequence[ReportTable]) -> str:
    """Plain aligned text, free of colour codes, identical across terminals."""
    buffer = io.StringIO()
    console = Console(
        file=buffer, width=TEXT_WIDTH, color_system=None, force_terminal=False, record=False
    )
    for table in tables:
        console.print(table.to_rich())
    return buffer.getvalue()


def render_csv(table: ReportTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.headers)
    writer.writerows(table.rows)
    return buffer.getvalue()


def write_text(path: Path, tables: Sequence[ReportTable]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_text(tables), encoding="utf-8")
    return path


def write_csv(path: Path, table: ReportTable) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(table), encoding="utf-8")
    return path


def write_json(path: Path, report: BaseModel) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
