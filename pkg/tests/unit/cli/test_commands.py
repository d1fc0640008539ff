"""Unit tests for CLI commands."""

import json
import logging
from pathlib import Path

import pytest
from typer.testing import CliRunner

from tiedmulti.cli.app import app
from tiedmulti.cli.common import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE
from tiedmulti.config.settings import Settings
from tiedmulti.services.sizes import SIZES_JSON
from tiedmulti.utils.logger import logger

runner = CliRunner()


def _results(output: str) -> dict[str, str]:
    """`key<TAB>value` lines printed by the piped UI."""
    pairs = (line.split("\t", 1) for line in output.splitlines() if line.count("\t") == 1)
    return {k: v for k, v in pairs}


@pytest.fixture
def toy_data(tmp_path: Path, isolated_settings: Path) -> Path:
    out = tmp_path / "data"
    result = runner.invoke(
        app,
        [
            "gen-data",
            "--size", "20",
            "--symbols", "4",
            "--min-len", "2",
            "--max-len", "4",
            "--seed", "5",
            "--out", str(out),
        ],
    )
    assert result.exit_code == EXIT_OK, result.output
    return out


def test_cli_help() -> None:
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == EXIT_OK
    for command in ("gen-data", "train", "cost-benefit", "oracle", "select-decode", "report"):
        assert command in result.stdout


def test_gen_data_writes_splits_and_vocabulary(toy_data: Path) -> None:
    train = (toy_data / "train.tsv").read_text(encoding="utf-8").splitlines()
    test = (toy_data / "test.tsv").read_text(encoding="utf-8").splitlines()
    assert len(train) + len(test) == 20
    assert (toy_data / "vocab.txt").exists()
    source, target = train[0].split("\t")
    assert target.split() == source.split()[::-1]


def test_gen_data_reports_paths(tmp_path: Path, isolated_settings: Path) -> None:
    result = runner.invoke(
        app, ["gen-data", "--size", "20", "--symbols", "4", "--out", str(tmp_path / "d")]
    )
    assert result.exit_code == EXIT_OK, result.output
    assert _results(result.stdout)["vocab"] == str(tmp_path / "d" / "vocab.txt")


def test_sizes_base_model(isolated_settings: Path) -> None:
    result = runner.invoke(app, ["sizes", "--base"])
    assert result.exit_code == EXIT_OK, result.output
    results = _results(result.stdout)
    assert float(results["rs_fewer_than_vanilla_sum"]) > float(
        results["rs_fewer_than_rs_sum"]
    )
    assert "36 vanilla" in result.stdout


def test_sizes_writes_report(tmp_path: Path, isolated_settings: Path) -> None:
    result = runner.invoke(
        app, ["sizes", "--enc-layers", "2", "--dec-layers", "2", "--out", str(tmp_path)]
    )
    assert result.exit_code == EXIT_OK, result.output
    report = json.loads((tmp_path / SIZES_JSON).read_text(encoding="utf-8"))
    assert [row["model"] for row in report["rows"]][2:] == ["4 vanilla", "4 vanilla RS"]


def test_config_show(isolated_settings: Path) -> None:
    result = runner.invoke(app, ["config", "show"])
    assert result.exit_code == EXIT_OK
    assert "Configuration Settings" in result.stdout
    assert "enc_layers" in result.stdout


def test_config_get(isolated_settings: Path) -> None:
    result = runner.invoke(app, ["config", "get", "beam"])
    assert result.exit_code == EXIT_OK
    assert result.stdout.strip() == "beam=4"


def test_config_set_persists(isolated_settings: Path) -> None:
    result = runner.invoke(app, ["config", "set", "dec-layers", "6"])
    assert result.exit_code == EXIT_OK, result.output
    assert "Updated dec_layers = 6" in result.stdout
    loaded = Settings.load_from_file()
    assert loaded is not None
    assert loaded.dec_layers == 6

    shown = runner.invoke(app, ["config", "get", "dec_layers"])
    assert shown.stdout.strip() == "dec_layers=6"


def test_config_set_to_explicit_file(tmp_path: Path, isolated_settings: Path) -> None:
    config_file = tmp_path / "run.conf"
    config_file.write_text("seed = 3\n", encoding="utf-8")
    result = runner.invoke(app, ["--config", str(config_file), "config", "set", "mode", "greedy"])
    assert result.exit_code == EXIT_OK, result.output
    assert not isolated_settings.exists()
    loaded = Settings.load_from_file(config_file)
    assert loaded is not None
    assert (loaded.seed, loaded.mode) == (3, "greedy")


@pytest.mark.parametrize(
    ("key", "value"),
    [("no_such_key", "1"), ("beam", "zero"), ("beam", "0"), ("selector_lambda", "1.5")],
)
def test_config_set_rejects(isolated_settings: Path, key: str, value: str) -> None:
    result = runner.invoke(app, ["config", "set", key, value])
    assert result.exit_code == EXIT_USAGE
    assert not isolated_settings.exists()


def test_config_reset(isolated_settings: Path) -> None:
    runner.invoke(app, ["config", "set", "seed", "99"])
    result = runner.invoke(app, ["config", "reset", "--yes"])
    assert result.exit_code == EXIT_OK
    loaded = Settings.load_from_file()
    assert loaded is not None
    assert loaded.seed == Settings().seed


def test_config_reset_cancelled(isolated_settings: Path) -> None:
    result = runner.invoke(app, ["config", "reset"], input="n\n")
    assert result.exit_code == EXIT_OK
    assert "cancelled" in result.stdout
    assert not isolated_settings.exists()


def test_malformed_combo_is_a_usage_error(toy_data: Path, tmp_path: Path) -> None:
    checkpoint = tmp_path / "model.ckpt"
    checkpoint.write_bytes(b"")
    result = runner.invoke(
        app,
        [
            "decode",
            "--checkpoint", str(checkpoint),
            "--test", str(toy_data / "test.tsv"),
            "--combo", "three,two",
        ],
    )
    assert result.exit_code == EXIT_USAGE


def test_missing_checkpoint_is_a_usage_error(toy_data: Path, tmp_path: Path) -> None:
    result = runner.invoke(
        app,
        [
            "decode",
            "--checkpoint", str(tmp_path / "absent.ckpt"),
            "--test", str(toy_data / "test.tsv"),
        ],
    )
    assert result.exit_code == EXIT_USAGE


def test_corrupt_checkpoint_is_a_runtime_failure(toy_data: Path, tmp_path: Path) -> None:
    checkpoint = tmp_path / "model.ckpt"
    checkpoint.write_bytes(b"not a checkpoint")
    result = runner.invoke(
        app,
        [
            "decode",
            "--checkpoint", str(checkpoint),
            "--test", str(toy_data / "test.tsv"),
            "--out", str(tmp_path / "decode"),
        ],
    )
    assert result.exit_code == EXIT_RUNTIME
    assert "not a tiedmulti checkpoint" in result.output


def test_evaluate_needs_exactly_one_source(toy_data: Path) -> None:
    result = runner.invoke(app, ["evaluate", "--test", str(toy_data / "test.tsv")])
    assert result.exit_code == EXIT_USAGE


def test_report_without_artefacts_fails(tmp_path: Path, isolated_settings: Path) -> None:
    result = runner.invoke(app, ["report", "--run-dir", str(tmp_path)])
    assert result.exit_code == EXIT_RUNTIME
    assert "no reports found" in result.output


@pytest.mark.parametrize(
    ("flag", "level"), [("-q", logging.WARNING), ("-v", logging.DEBUG), (None, logging.INFO)]
)
def test_verbosity_flags(isolated_settings: Path, flag: str | None, level: int) -> None:
    args = [flag] if flag else []
    result = runner.invoke(app, [*args, "config", "get", "seed"])
    assert result.exit_code == EXIT_OK
    assert logger.level == level
