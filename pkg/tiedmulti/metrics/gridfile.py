"""Per-sentence score grids on disk.

    # sentence_id<TAB>N=3<TAB>M=3<TAB>order=n-major,m-fastest
    0<TAB>0.71<TAB>...        (K values)

Values are written in shortest round-trip form so exact ties survive a
write/read cycle.
"""

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from tiedmulti.metrics.oracle import CombinationGrid
from tiedmulti.utils.exceptions import CorpusError

ORDER_TAG = "order=n-major,m-fastest"


def write_grid_file(path: Path, grids: Sequence[tuple[int, CombinationGrid]]) -> Path:
    if not grids:
        raise CorpusError("no grids to write")
    N, M = grids[0][1].enc_layers, grids[0][1].dec_layers
    lines = [f"# sentence_id\tN={N}\tM={M}\t{ORDER_TAG}"]
    for sentence_id, grid in grids:
        lines.append("\t".join([str(sentence_id), *(repr(float(v)) for v in grid.values)]))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _header_value(cell: str, key: str) -> int:
    name, _, value = cell.partition("=")
    if name != key or not value.isdigit():
        raise CorpusError(f"grid header: expected {key}=<int>, got {cell!r}")
    return int(value)


def read_grid_file(path: Path) -> list[tuple[int, CombinationGrid]]:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise CorpusError(f"cannot read grid file {path}: {e}") from e
    if not lines or not lines[0].startswith("#"):
        raise CorpusError(f"{path}: missing grid header")
    header = lines[0].lstrip("# ").split("\t")
    if len(header) != 4 or header[3] != ORDER_TAG:
        raise CorpusError(f"{path}: unrecognised grid header {lines[0]!r}")
    N, M = _header_value(header[1], "N"), _header_value(header[2], "M")
    grids = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        try:
            values = np.asarray(cells[1:], dtype=np.float64)
            grids.append((int(cells[0]), CombinationGrid(values, N, M)))
        except ValueError as e:
            raise CorpusError(f"{path}:{lineno}: {e}") from e
    return grids
