"""Pytest configuration and shared fixtures."""

from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest

from tiedmulti.config.experiment import BeamConfig, ModelConfig, TrainingConfig
from tiedmulti.config.settings import ENV_PREFIX, Settings
from tiedmulti.core.kinds import Precision
from tiedmulti.engine.tensor import set_precision
from tiedmulti.model.transformer import Parameters, init_parameters


@pytest.fixture(autouse=True)
def float64_precision() -> Generator[None, None, None]:
    """Every test starts (and ends) in 64-bit arithmetic."""
    set_precision(Precision.FLOAT64)
    yield
    set_precision(Precision.FLOAT64)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def tiny_config() -> ModelConfig:
    """3 x 3 model small enough for exhaustive checks."""
    return ModelConfig(
        enc_layers=3, dec_layers=3, d_model=8, heads=2, d_ff=16, vocab=12, max_len=16
    )


@pytest.fixture
def tiny_params(tiny_config: ModelConfig) -> Parameters:
    return init_parameters(tiny_config, seed=7)


@pytest.fixture
def quick_training() -> TrainingConfig:
    return TrainingConfig(
        steps=6,
        batch_size=4,
        learning_rate=1.0,
        warmup_steps=2,
        label_smoothing=0.1,
        seed=11,
        checkpoint_every=2,
        keep_last=2,
    )


@pytest.fixture
def short_beam() -> BeamConfig:
    return BeamConfig(beam=3, alpha=0.6, max_len=8)


@pytest.fixture
def temp_config_dir(tmp_path: Path) -> Generator[Path, None, None]:
    """Provide a temporary config directory for testing."""
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    yield config_dir


@pytest.fixture
def isolated_settings(
    temp_config_dir: Path, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> Path:
    """Point the config file and data root at temp dirs and clear TIEDMULTI_* variables.

    Returns the config file path (not created).
    """
    config_file = temp_config_dir / "settings.conf"
    data_dir = tmp_path / "data-root"

    def get_test_config_path(cls: type) -> Path:
        return config_file

    def get_test_data_dir(cls: type) -> Path:
        return data_dir

    monkeypatch.setattr(
        "tiedmulti.config.settings.Settings.get_config_path",
        classmethod(get_test_config_path),
    )
    monkeypatch.setattr(
        "tiedmulti.config.settings.Settings.get_data_dir",
        classmethod(get_test_data_dir),
    )
    for key in Settings.model_fields:
        monkeypatch.delenv(f"{ENV_PREFIX}{key.upper()}", raising=False)
    return config_file
