"""Rich UI: a transient status line (spinner, stage, progress bar) above plain results."""

from rich.console import Console, RenderableType
from rich.live import Live
from rich.progress_bar import ProgressBar
from rich.spinner import Spinner
from rich.table import Table
from rich.text import Text

from tiedmulti.adapters.reports.tables import ReportTable
from tiedmulti.cli.ui.base import StageProgress, UIOutput

_DEFAULT_CONSOLE = Console()
_BAR_WIDTH = 30


class RichUI(UIOutput):
    """One Live status line per command; stopped before anything permanent is printed."""

    def __init__(self, console: Console | None = None) -> None:
        self._console = console or _DEFAULT_CONSOLE
        self._live: Live | None = None
        self._spinner = Spinner("dots", style="cyan")

    def _status(self, label: Text, progress: StageProgress | None = None) -> RenderableType:
        self._spinner.update(text=label)
        if progress is None or progress.total <= 0:
            return self._spinner
        row = Table.grid(padding=(0, 1))
        row.add_row(
            self._spinner,
            ProgressBar(total=progress.total, completed=progress.done, width=_BAR_WIDTH),
            Text(f"{progress.done}/{progress.total}", style="cyan"),
            Text(progress.detail, style="dim"),
        )
        return row

    def _update(self, renderable: RenderableType) -> None:
        if self._live is None:
            self._live = Live(
                renderable, console=self._console, transient=True, refresh_per_second=12
            )
            self._live.start()
        else:
            self._live.update(renderable, refresh=True)

    def _stop(self) -> None:
        if self._live is not None:
            self._live.stop()
            self._live = None

    def show_error(self, message: str, details: str | None = None) -> None:
        self._stop()
        self._console.print(f"[red]Error: {message}[/red]")
        if details:
            self._console.print(f"[dim]{details}[/dim]")

    def show_warning(self, message: str) -> None:
        self._console.print(f"[yellow]Warning: {message}[/yellow]")

    def show_info(self, message: str) -> None:
        self._console.print(f"[cyan]{message}[/cyan]")

    def show_step(self, step: str) -> None:
        self._update(self._status(Text(step, style="cyan")))

    def show_progress(self, progress: StageProgress) -> None:
        self._update(self._status(Text(progress.stage, style="bold green"), progress))

    def show_table(self, table: ReportTable) -> None:
        self._stop()
        self._console.print(table.to_rich())

    def show_result(self, key: str, value: str) -> None:
        self._stop()
        self._console.print(f"[bold]{key}[/bold]: {value}")

    def cleanup(self) -> None:
        self._stop()
