"""Tests for oracle analysis over decode logs."""

import json
from pathlib import Path

import pytest

from tiedmulti.core.models import LayerCombination
from tiedmulti.metrics.gridfile import read_grid_file
from tiedmulti.services.oracle import (
    GRID_FILE,
    HISTOGRAM_CSV,
    REPORT_JSON,
    REPORT_TEXT,
    run_oracle,
)
from tiedmulti.utils.exceptions import CorpusError

from .decode_logs import REFERENCES


def test_oracle_picks_fastest_perfect_output(decode_logs: Path, tmp_path: Path) -> None:
    out = tmp_path / "oracle"
    report = run_oracle(decode_logs, REFERENCES, 2, 2, out)
    # Sentence 0 ties (1,1) and (1,2); sentences 1 and 2 tie on (2,1).
    assert report.histogram == [1, 0, 2, 0]
    assert report.oracle_bleu == pytest.approx(100.0)
    assert report.oracle_seconds == pytest.approx(0.1 + 0.3 + 0.3)
    assert report.baseline_seconds == pytest.approx(1.2)
    assert report.baseline_bleu < report.oracle_bleu
    assert report.family == "tied-multi"

    grids = read_grid_file(out / GRID_FILE)
    assert [sid for sid, _ in grids] == [0, 1, 2]
    assert grids[0][1].at(LayerCombination(1, 1)) == pytest.approx(1.0)
    assert json.loads((out / REPORT_JSON).read_text())["sentences"] == 3
    assert (out / REPORT_TEXT).exists()
    assert (out / HISTOGRAM_CSV).read_text().splitlines()[0] == "n,m,count"


def test_family_label_is_kept(decode_logs: Path, tmp_path: Path) -> None:
    report = run_oracle(decode_logs, REFERENCES, 2, 2, tmp_path / "v", family="vanilla")
    assert report.family == "vanilla"


def test_missing_logs(tmp_path: Path) -> None:
    with pytest.raises(CorpusError):
        run_oracle(tmp_path / "nothing", REFERENCES, 2, 2, tmp_path / "out")
