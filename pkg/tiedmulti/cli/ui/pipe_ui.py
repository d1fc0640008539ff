"""Minimal UI for non-TTY stdout (pipes, redirects)."""

import sys

from tiedmulti.adapters.reports.tables import ReportTable
from tiedmulti.cli.ui.base import StageProgress, UIOutput


class PipeUI(UIOutput):
    """Tab-separated results on stdout. Errors and warnings go to stderr."""

    def show_error(self, message: str, details: str | None = None) -> None:
        print(f"Error: {message}", file=sys.stderr)
        if details:
            print(details, file=sys.stderr)

    def show_warning(self, message: str) -> None:
        print(f"Warning: {message}", file=sys.stderr)

    def show_info(self, message: str) -> None:
        pass

    def show_step(self, step: str) -> None:
        pass

    def show_progress(self, progress: StageProgress) -> None:
        pass

    def show_table(self, table: ReportTable) -> None:
        print("\t".join(table.headers))
        for row in table.rows:
            print("\t".join(row))

    def show_result(self, key: str, value: str) -> None:
        print(f"{key}\t{value}")

    def cleanup(self) -> None:
        pass
