"""Tests for the run-level report."""

from pathlib import Path

import pytest

from tiedmulti.adapters.reports.tables import write_json
from tiedmulti.config.experiment import ModelConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import TrainSummary
from tiedmulti.services.cost_benefit import REPORT_JSON, cost_benefit_from_logs
from tiedmulti.services.oracle import run_oracle
from tiedmulti.services.report import (
    REPORT_CSV,
    REPORT_TEXT,
    TIMING_CSV,
    TIMING_TEXT,
    collect_report,
    write_report,
)
from tiedmulti.services.sizes import SIZES_JSON, report_model_sizes
from tiedmulti.utils.exceptions import CorpusError

from .decode_logs import REFERENCES


@pytest.fixture
def run_dir(decode_logs: Path, tiny_config: ModelConfig, tmp_path: Path) -> Path:
    root = tmp_path / "run"
    cost = cost_benefit_from_logs(
        decode_logs, REFERENCES, 2, 2, DecodeMode.GREEDY, "tied-multi", "model.ckpt"
    )
    write_json(root / "tied" / REPORT_JSON, cost)
    run_oracle(decode_logs, REFERENCES, 2, 2, root / "tied" / "oracle")
    write_json(root / SIZES_JSON, report_model_sizes(tiny_config))
    summary = TrainSummary(
        kind="vanilla",
        model={"enc_layers": 2, "dec_layers": 2},
        training={},
        pairs=4,
        steps=3,
        final_loss=0.5,
        seconds=2.0,
    )
    (root / "vanilla").mkdir(parents=True)
    (root / "vanilla" / "train_summary.json").write_text(summary.model_dump_json())
    return root


def test_collects_every_artefact(run_dir: Path) -> None:
    report = collect_report(run_dir)
    titles = [t.title for t in report.quality]
    assert any("BLEU by combination" in t for t in titles)
    assert any("Oracle combinations" in t for t in titles)
    assert any("Model sizes" in t for t in titles)
    assert "Training runs" in titles
    assert any("Training time relative" in t.title for t in report.timing)


def test_quality_report_excludes_timing(run_dir: Path, tmp_path: Path) -> None:
    first = write_report(run_dir, tmp_path / "a")
    assert [p.name for p in first] == [REPORT_TEXT, REPORT_CSV, TIMING_TEXT, TIMING_CSV]
    text = (tmp_path / "a" / REPORT_TEXT).read_text()
    assert "seconds" not in text and "total_s" not in text
    assert "total_s" in (tmp_path / "a" / TIMING_TEXT).read_text()


def test_quality_report_is_reproducible(run_dir: Path, tmp_path: Path) -> None:
    write_report(run_dir, tmp_path / "a")
    write_report(run_dir, tmp_path / "b")
    for name in (REPORT_TEXT, REPORT_CSV):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / REPORT_CSV).read_text().startswith("table,row,column,value\n")


def test_empty_or_missing_run_dir(tmp_path: Path) -> None:
    with pytest.raises(CorpusError):
        collect_report(tmp_path / "absent")
    (tmp_path / "empty").mkdir()
    with pytest.raises(CorpusError):
        write_report(tmp_path / "empty", tmp_path / "out")
