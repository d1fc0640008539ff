"""UI layer for CLI output formatting."""

import sys

from tiedmulti.cli.ui.base import StageProgress, UIOutput
from tiedmulti.cli.ui.pipe_ui import PipeUI
from tiedmulti.cli.ui.rich_ui import RichUI


def select_ui() -> UIOutput:
    """RichUI on a terminal, PipeUI when stdout is piped or redirected."""
    if not sys.stdout.isatty():
        return PipeUI()
    return RichUI()


__all__ = ["PipeUI", "RichUI", "StageProgress", "UIOutput", "select_ui"]
