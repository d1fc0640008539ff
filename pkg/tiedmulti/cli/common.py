"""Options and helpers shared by the subcommands."""

from pathlib import Path
from typing import Annotated, Any

import typer

from tiedmulti.config.settings import Settings
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import LayerCombination
from tiedmulti.engine.tensor import set_precision
from tiedmulti.utils.exceptions import CombinationError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def parse_combo(value: str | None) -> LayerCombination | None:
    if value is None:
        return None
    try:
        return LayerCombination.parse(value)
    except CombinationError as e:
        raise typer.BadParameter(f"expected n,m (e.g. 3,2), got {value!r}") from e


SeedOption = Annotated[int | None, typer.Option("--seed", help="Master random seed")]
EncLayersOption = Annotated[
    int | None, typer.Option("--enc-layers", min=1, help="Encoder depth N")
]
DecLayersOption = Annotated[
    int | None, typer.Option("--dec-layers", min=1, help="Decoder depth M")
]
ComboOption = Annotated[
    LayerCombination | None,
    typer.Option("--combo", parser=parse_combo, metavar="n,m", help="Layer combination"),
]
BeamOption = Annotated[int | None, typer.Option("--beam", min=1, help="Beam width")]
AlphaOption = Annotated[float | None, typer.Option("--alpha", min=0.0, help="Length penalty")]
ModeOption = Annotated[DecodeMode | None, typer.Option("--mode", help="greedy or beam")]
RsOption = Annotated[
    bool, typer.Option("--rs", help="Recurrent stacking: share one layer across each stack")
]
OutOption = Annotated[Path | None, typer.Option("--out", help="Output directory")]
WorkersOption = Annotated[
    int | None, typer.Option("--workers", min=1, help="Parallel decode workers")
]


def get_settings(ctx: typer.Context, **overrides: Any) -> Settings:
    """Settings loaded by the root callback with this command's flags applied."""
    base = ctx.obj if isinstance(ctx.obj, Settings) else Settings()
    settings = base.with_overrides(**overrides)
    set_precision(settings.precision)
    return settings


def resolve_out(settings: Settings, out: Path | None, name: str) -> Path:
    """--out if given, else <out_dir>/<name> under the configured or platform data root."""
    if out is not None:
        return out
    root = settings.out_dir or Settings.get_data_dir()
    return root / name
