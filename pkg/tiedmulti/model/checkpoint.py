"""Binary weight containers.

Layout (little-endian):

    magic b"TMCK" | u32 version | u8 kind length | kind (utf-8)
    u32 header count | header count x (u8 key length | key | i64 value)
    u32 record count | per record: u16 name length | name | u8 ndim | ndim x u32 | float32 data

Records are written in `named_parameters()` order, so identical weights give
identical bytes.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from tiedmulti.config.experiment import ModelConfig
from tiedmulti.engine.tensor import Array, default_dtype
from tiedmulti.model.transformer import Parameters, init_parameters
from tiedmulti.utils.exceptions import CheckpointError

MAGIC = b"TMCK"
FORMAT_VERSION = 1
MODEL_KIND = "transformer"

_MODEL_HEADER = (
    "enc_layers",
    "dec_layers",
    "d_model",
    "heads",
    "d_ff",
    "vocab",
    "max_len",
    "recurrent_stacking",
    "dropout_ppm",
)


@dataclass
class Container:
    """Decoded file contents before they are bound to a model."""

    kind: str
    header: dict[str, int]
    records: dict[str, Array]


def write_container(
    path: Path, kind: str, header: dict[str, int], records: list[tuple[str, Array]]
) -> Path:
    out = bytearray(MAGIC)
    out += struct.pack("<I", FORMAT_VERSION)
    kind_bytes = kind.encode("utf-8")
    out += struct.pack("<B", len(kind_bytes)) + kind_bytes
    out += struct.pack("<I", len(header))
    for key, value in header.items():
        key_bytes = key.encode("utf-8")
        out += struct.pack("<B", len(key_bytes)) + key_bytes + struct.pack("<q", value)
    out += struct.pack("<I", len(records))
    for name, data in records:
        name_bytes = name.encode("utf-8")
        out += struct.pack("<H", len(name_bytes)) + name_bytes
        out += struct.pack("<B", data.ndim)
        out += struct.pack(f"<{data.ndim}I", *data.shape)
        out += np.ascontiguousarray(data, dtype="<f4").tobytes()
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_bytes(bytes(out))
    except OSError as e:
        raise CheckpointError(f"cannot write {path}: {e}") from e
    return path


class _Reader:
    def __init__(self, raw: bytes, path: Path) -> None:
        self.raw = raw
        self.pos = 0
        self.path = path

    def unpack(self, fmt: str) -> tuple[int, ...]:
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.raw):
            raise CheckpointError(f"{self.path}: truncated file")
        values = struct.unpack_from(fmt, self.raw, self.pos)
        self.pos += size
        return values

    def text(self, length: int) -> str:
        if self.pos + length > len(self.raw):
            raise CheckpointError(f"{self.path}: truncated file")
        value = self.raw[self.pos : self.pos + length].decode("utf-8")
        self.pos += length
        return value

    def floats(self, count: int) -> Array:
        size = 4 * count
        if self.pos + size > len(self.raw):
            raise CheckpointError(f"{self.path}: truncated file")
        data = np.frombuffer(self.raw, dtype="<f4", count=count, offset=self.pos)
        self.pos += size
        return data


def read_container(path: Path) -> Container:
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read {path}: {e}") from e
    if raw[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a tiedmulti checkpoint")
    reader = _Reader(raw, path)
    reader.pos = 4
    (version,) = reader.unpack("<I")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    (kind_len,) = reader.unpack("<B")
    kind = reader.text(kind_len)
    header: dict[str, int] = {}
    (count,) = reader.unpack("<I")
    for _ in range(count):
        (key_len,) = reader.unpack("<B")
        key = reader.text(key_len)
        (header[key],) = reader.unpack("<q")
    records: dict[str, Array] = {}
    (count,) = reader.unpack("<I")
    for _ in range(count):
        (name_len,) = reader.unpack("<H")
        name = reader.text(name_len)
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I")
        records[name] = reader.floats(int(np.prod(shape))).reshape(shape)
    return Container(kind=kind, header=header, records=records)


def config_header(config: ModelConfig) -> dict[str, int]:
    return {
        "enc_layers": config.enc_layers,
        "dec_layers": config.dec_layers,
        "d_model": config.d_model,
        "heads": config.heads,
        "d_ff": config.d_ff,
        "vocab": config.vocab,
        "max_len": config.max_len,
        "recurrent_stacking": int(config.recurrent_stacking),
        "dropout_ppm": round(config.dropout * 1_000_000),
    }


def config_from_header(header: dict[str, int]) -> ModelConfig:
    missing = [key for key in _MODEL_HEADER if key not in header]
    if missing:
        raise CheckpointError(f"checkpoint header lacks {', '.join(missing)}")
    try:
        return _model_config(header)
    except ValidationError as e:
        raise CheckpointError(f"checkpoint header describes an invalid model: {e}") from e


def _model_config(header: dict[str, int]) -> ModelConfig:
    return ModelConfig(
        enc_layers=header["enc_layers"],
        dec_layers=header["dec_layers"],
        d_model=header["d_model"],
        heads=header["heads"],
        d_ff=header["d_ff"],
        vocab=header["vocab"],
        max_len=header["max_len"],
        recurrent_stacking=bool(header["recurrent_stacking"]),
        dropout=header["dropout_ppm"] / 1_000_000,
    )


def bind_records(params: Parameters, records: dict[str, Array], source: Path | str) -> Parameters:
    """Overwrite every weight of `params` from named records; names must match exactly."""
    expected = dict(params.named_parameters())
    if set(expected) != set(records):
        missing = sorted(set(expected) - set(records))
        extra = sorted(set(records) - set(expected))
        raise CheckpointError(f"{source}: weight names differ (missing {missing}, extra {extra})")
    for name, tensor in expected.items():
        if records[name].shape != tensor.shape:
            raise CheckpointError(
                f"{source}: {name} has shape {records[name].shape}, expected {tensor.shape}"
            )
        tensor.data = records[name].astype(default_dtype())
    params.positions = params.positions.astype(default_dtype())
    return params


def save_checkpoint(params: Parameters, path: Path) -> Path:
    records = [(name, t.data) for name, t in params.named_parameters()]
    return write_container(path, MODEL_KIND, config_header(params.config), records)


def load_checkpoint(path: Path) -> Parameters:
    """Rebuild a model (including recurrent-stacking identity) from a checkpoint file."""
    container = read_container(path)
    if container.kind != MODEL_KIND:
        raise CheckpointError(f"{path}: holds a {container.kind!r}, not a translation model")
    config = config_from_header(container.header)
    return bind_records(init_parameters(config), container.records, path)
