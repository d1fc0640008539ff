"""Main CLI application entry point."""

import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Annotated, Any

import click
import typer
from typer.core import TyperGroup

from tiedmulti.cli.commands.analysis import (
    cost_benefit_command,
    oracle_command,
    report_command,
    sizes_command,
)
from tiedmulti.cli.commands.config import config_app
from tiedmulti.cli.commands.decode import decode_command, evaluate_command
from tiedmulti.cli.commands.distill import distill_command
from tiedmulti.cli.commands.gen_data import gen_data_command
from tiedmulti.cli.commands.selector import (
    build_selector_data_command,
    select_decode_command,
    train_selector_command,
)
from tiedmulti.cli.commands.train import train_command, train_vanilla_grid_command
from tiedmulti.cli.common import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE
from tiedmulti.cli.ui import select_ui
from tiedmulti.config.settings import Settings
from tiedmulti.utils.exceptions import TiedMultiError
from tiedmulti.utils.logger import set_verbosity


class ExitCodeGroup(TyperGroup):
    """Maps outcomes to exit codes: 0 success, 1 usage error, 2 runtime failure."""

    def main(  # type: ignore[override]
        self,
        args: Sequence[str] | None = None,
        prog_name: str | None = None,
        complete_var: str | None = None,
        standalone_mode: bool = True,
        **extra: Any,
    ) -> Any:
        try:
            rv = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(130)
        except (TiedMultiError, OSError) as e:
            select_ui().show_error(str(e))
            sys.exit(EXIT_RUNTIME)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


app = typer.Typer(
    name="tiedmulti",
    help="Train and analyse tied-multi Transformers: one model, every layer combination",
    cls=ExitCodeGroup,
    no_args_is_help=True,
    rich_markup_mode="markdown",
)

app.add_typer(config_app, name="config")

app.command(name="gen-data")(gen_data_command)
app.command(name="train")(train_command)
app.command(name="train-vanilla-grid")(train_vanilla_grid_command)
app.command(name="decode")(decode_command)
app.command(name="evaluate")(evaluate_command)
app.command(name="cost-benefit")(cost_benefit_command)
app.command(name="oracle")(oracle_command)
app.command(name="build-selector-data")(build_selector_data_command)
app.command(name="train-selector")(train_selector_command)
app.command(name="select-decode")(select_decode_command)
app.command(name="distill")(distill_command)
app.command(name="sizes")(sizes_command)
app.command(name="report")(report_command)


@app.callback()
def root(
    ctx: typer.Context,
    config: Annotated[
        Path | None,
        typer.Option(
            "--config",
            exists=True,
            dir_okay=False,
            help="key=value settings file (default: the platform config file)",
        ),
    ] = None,
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Debug logging")
    ] = False,
    quiet: Annotated[
        bool, typer.Option("--quiet", "-q", help="Warnings and errors only")
    ] = False,
) -> None:
    """Tied-multi Transformer toolkit."""
    set_verbosity(verbose=verbose, quiet=quiet)
    ctx.obj = Settings.load_from_file(config) or Settings()


def main() -> None:
    """Main entry point for the CLI application."""
    app()
