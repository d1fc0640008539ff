"""Tests for the binary checkpoint container."""

from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tiedmulti.config.experiment import ModelConfig
from tiedmulti.model.checkpoint import (
    MAGIC,
    load_checkpoint,
    read_container,
    save_checkpoint,
)
from tiedmulti.model.transformer import Parameters, init_parameters
from tiedmulti.utils.exceptions import CheckpointError


def test_save_and_load_preserve_config_and_weights(
    tiny_params: Parameters, tmp_path: Path
) -> None:
    path = save_checkpoint(tiny_params, tmp_path / "model.ckpt")
    loaded = load_checkpoint(path)
    assert loaded.config == tiny_params.config
    for (name, original), (_, restored) in zip(
        tiny_params.named_parameters(), loaded.named_parameters(), strict=True
    ):
        assert_allclose(restored.data, original.data.astype(np.float32), err_msg=name)


def test_identical_weights_give_identical_bytes(tiny_config: ModelConfig, tmp_path: Path) -> None:
    a = save_checkpoint(init_parameters(tiny_config, seed=1), tmp_path / "a.ckpt")
    b = save_checkpoint(init_parameters(tiny_config, seed=1), tmp_path / "b.ckpt")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(MAGIC)


def test_recurrent_stacking_survives_reload(tiny_config: ModelConfig, tmp_path: Path) -> None:
    rs = init_parameters(tiny_config.model_copy(update={"recurrent_stacking": True}))
    loaded = load_checkpoint(save_checkpoint(rs, tmp_path / "rs.ckpt"))
    assert loaded.config.recurrent_stacking
    assert loaded.encoder_layer(1) is loaded.encoder_layer(2)


def test_corrupt_files_raise_checkpoint_error(tiny_params: Parameters, tmp_path: Path) -> None:
    path = save_checkpoint(tiny_params, tmp_path / "model.ckpt")
    raw = path.read_bytes()

    bad_magic = tmp_path / "magic.ckpt"
    bad_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(CheckpointError):
        read_container(bad_magic)

    truncated = tmp_path / "short.ckpt"
    truncated.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(CheckpointError):
        load_checkpoint(truncated)

    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "missing.ckpt")
