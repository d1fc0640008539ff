"""Config management commands for the tiedmulti CLI."""

from pathlib import Path

import typer
from rich.console import Console
from rich.table import Table

from tiedmulti.config.settings import Settings
from tiedmulti.utils.exceptions import ConfigurationError

console = Console()

config_app = typer.Typer(help="Manage configuration (show, get, set, reset)")


def _config_path(ctx: typer.Context) -> Path:
    """The file named by the root --config option, else the platform default."""
    given = ctx.find_root().params.get("config")
    return given if isinstance(given, Path) else Settings.get_config_path()


def _current(ctx: typer.Context) -> Settings:
    root = ctx.find_root().obj
    return root if isinstance(root, Settings) else Settings()


def _check_key(key: str) -> str:
    name = key.replace("-", "_")
    if name not in Settings.model_fields:
        raise typer.BadParameter(
            f"unknown setting {key!r}; valid keys: {', '.join(sorted(Settings.model_fields))}",
            param_hint="KEY",
        )
    return name


@config_app.command(name="show")
def config_show(ctx: typer.Context) -> None:
    """Display the effective settings (defaults, config file and environment)."""
    settings = _current(ctx)
    table = Table(title="Configuration Settings", show_header=True, header_style="bold cyan")
    table.add_column("Setting", style="cyan", no_wrap=True)
    table.add_column("Value", style="green")
    for key, value in sorted(settings.model_dump(mode="json").items()):
        table.add_row(key, "[dim]None[/dim]" if value is None else str(value))

    config_path = _config_path(ctx)
    console.print()
    console.print(table)
    state = "" if config_path.exists() else " (not created yet)"
    console.print(f"\n[dim]Config file: {config_path}{state}[/dim]")


@config_app.command(name="get")
def config_get(ctx: typer.Context, key: str) -> None:
    """Print a single configuration value.

    Args:
        key: The setting key to retrieve (e.g., 'enc_layers')
    """
    name = _check_key(key)
    value = getattr(_current(ctx), name)
    typer.echo(f"{name}={'' if value is None else value}")


@config_app.command(name="set")
def config_set(ctx: typer.Context, key: str, value: str) -> None:
    """Validate and store a setting in the config file.

    Args:
        key: The setting key to update
        value: The new value, parsed with the setting's type
    """
    name = _check_key(key)
    config_path = _config_path(ctx)
    settings = Settings.load_from_file(config_path) or Settings()
    try:
        updated = settings.with_overrides(**{name: value})
    except ConfigurationError as e:
        raise typer.BadParameter(f"invalid value {value!r} for {name}", param_hint="VALUE") from e
    updated.save_to_file(config_path)
    console.print(f"[green]✓ Updated {name} = {getattr(updated, name)}[/green]")


@config_app.command(name="reset")
def config_reset(
    ctx: typer.Context,
    yes: bool = typer.Option(False, "--yes", "-y", help="Do not ask for confirmation"),
) -> None:
    """Reset the config file to defaults."""
    config_path = _config_path(ctx)
    if not yes and not typer.confirm("Reset all settings to defaults?", default=False):
        console.print("[yellow]Reset cancelled.[/yellow]")
        raise typer.Exit(code=0)
    Settings().save_to_file(config_path)
    console.print("[green]✓ Configuration reset to defaults[/green]")
