"""Tests for the rich terminal UI."""

import io

from pytest_mock import MockerFixture
from rich.console import Console

from tiedmulti.adapters.reports.tables import ReportTable
from tiedmulti.cli.ui import PipeUI, RichUI, select_ui
from tiedmulti.cli.ui.base import StageProgress


def _make_rich_ui_with_buffer() -> tuple[RichUI, io.StringIO]:
    buf = io.StringIO()
    console = Console(file=buf, force_terminal=True, width=80)
    return RichUI(console=console), buf


def test_result_printed_with_key() -> None:
    ui, buf = _make_rich_ui_with_buffer()
    ui.show_result("chrf", "0.8123")
    assert "chrf" in buf.getvalue()
    assert "0.8123" in buf.getvalue()


def test_table_rendered_with_title_and_cells() -> None:
    ui, buf = _make_rich_ui_with_buffer()
    table = ReportTable(title="Oracle histogram", headers=["n", "m", "count"])
    table.add_row(1, 2, 7)
    ui.show_table(table)
    output = buf.getvalue()
    assert "Oracle histogram" in output
    assert "count" in output


def test_error_stops_spinner_and_prints_details() -> None:
    ui, buf = _make_rich_ui_with_buffer()
    ui.show_step("Decoding")
    ui.show_progress(StageProgress("Decoding", 2, 5, "3 failures"))
    ui.show_error("decode failed", "sentence 4 too long")
    output = buf.getvalue()
    assert ui._live is None
    assert "Error: decode failed" in output
    assert "sentence 4 too long" in output


def test_cleanup_is_idempotent() -> None:
    ui, _ = _make_rich_ui_with_buffer()
    ui.show_step("Training")
    ui.cleanup()
    ui.cleanup()
    assert ui._live is None


def test_select_ui_pipes_when_not_a_tty() -> None:
    # pytest captures stdout, so it is never a terminal here
    assert isinstance(select_ui(), PipeUI)


def test_select_ui_uses_rich_on_a_terminal(mocker: MockerFixture) -> None:
    stdout = mocker.patch("tiedmulti.cli.ui.sys.stdout")
    stdout.isatty.return_value = True
    assert isinstance(select_ui(), RichUI)
