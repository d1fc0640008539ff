"""Checkpoint averaging."""

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.model.transformer import Parameters, init_parameters
from tiedmulti.utils.exceptions import CheckpointError
from tiedmulti.utils.logger import logger


def average_checkpoints(ckpts: Sequence[Parameters]) -> Parameters:
    """Elementwise arithmetic mean of every weight of models sharing one config."""
    if not ckpts:
        raise CheckpointError("no checkpoints to average")
    config = ckpts[0].config
    for other in ckpts[1:]:
        if other.config != config:
            raise CheckpointError(f"cannot average {config} with {other.config}")
    averaged = init_parameters(config)
    named = [dict(p.named_parameters()) for p in ckpts]
    for name, tensor in averaged.named_parameters():
        stacked = np.stack([n[name].data for n in named])
        tensor.data = stacked.sum(axis=0) / len(ckpts)
    return averaged


def average_checkpoint_files(paths: Sequence[Path]) -> Parameters:
    logger.info(f"Averaging {len(paths)} checkpoints")
    return average_checkpoints([load_checkpoint(p) for p in paths])
