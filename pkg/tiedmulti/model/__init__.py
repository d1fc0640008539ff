"""Tied-multi Transformer and its checkpoint format."""

from tiedmulti.model.checkpoint import load_checkpoint, save_checkpoint
from tiedmulti.model.transformer import (
    EncoderStates,
    Parameters,
    checkpoint_variable_count,
    decode_states,
    encode_all,
    extract_submodel,
    forward_combination,
    init_parameters,
    param_count,
    project,
)

__all__ = [
    "EncoderStates",
    "Parameters",
    "checkpoint_variable_count",
    "decode_states",
    "encode_all",
    "extract_submodel",
    "forward_combination",
    "init_parameters",
    "load_checkpoint",
    "param_count",
    "project",
    "save_checkpoint",
]
