"""Base UI abstraction for command output."""

from dataclasses import dataclass
from typing import Protocol

from tiedmulti.adapters.reports.tables import ReportTable


@dataclass
class StageProgress:
    """Progress of a long stage (training steps, decoded sentences)."""

    stage: str
    done: int
    total: int
    detail: str = ""


class UIOutput(Protocol):
    """
    Protocol for UI output implementations.

    Structural typing: any class with these methods can be used as UIOutput.
    """

    def show_error(self, message: str, details: str | None = None) -> None:
        """Display an error message."""
        ...

    def show_warning(self, message: str) -> None:
        """Display a warning message."""
        ...

    def show_info(self, message: str) -> None:
        """Display an info message."""
        ...

    def show_step(self, step: str) -> None:
        """Display the pipeline stage that just started."""
        ...

    def show_progress(self, progress: StageProgress) -> None:
        """Display stage progress (called repeatedly)."""
        ...

    def show_table(self, table: ReportTable) -> None:
        """Display a result table."""
        ...

    def show_result(self, key: str, value: str) -> None:
        """Display one named result value."""
        ...

    def cleanup(self) -> None:
        """Cleanup any UI resources (e.g., Live displays)."""
        ...
