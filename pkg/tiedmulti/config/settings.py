"""Configuration management using pydantic-settings."""

import os
from pathlib import Path
from typing import Any, TypeVar

from platformdirs import user_config_dir, user_data_dir
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from tiedmulti.config.experiment import (
    BeamConfig,
    ModelConfig,
    SelectorConfig,
    ToyTaskSpec,
    TrainingConfig,
)
from tiedmulti.core.kinds import DecodeMode, Precision, ToyTask
from tiedmulti.utils.exceptions import ConfigurationError

ENV_PREFIX = "TIEDMULTI_"

_ConfigT = TypeVar("_ConfigT", bound=BaseModel)


class Settings(BaseSettings):
    """
    Harness settings with environment variable support & key=value config files.
    Priority: CLI flags > environment > config file > defaults
    """

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        extra="ignore",
    )

    seed: int = Field(default=1234)
    out_dir: Path | None = Field(default=None, description="Root for run artefacts")
    precision: Precision = Field(default=Precision.FLOAT64)
    workers: int = Field(default=1, ge=1, description="Parallel decode workers")

    # Model
    enc_layers: int = Field(default=3, ge=1)
    dec_layers: int = Field(default=3, ge=1)
    d_model: int = Field(default=32, ge=1)
    heads: int = Field(default=4, ge=1)
    d_ff: int = Field(default=64, ge=1)
    vocab: int = Field(default=32, ge=5)
    max_len: int = Field(default=32, ge=3)
    recurrent_stacking: bool = Field(default=False)
    dropout: float = Field(default=0.0, ge=0.0, lt=1.0)

    # Training
    steps: int = Field(default=2000, gt=0)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=2.0, ge=0.0)
    warmup_steps: int = Field(default=400, ge=0)
    label_smoothing: float = Field(default=0.1, ge=0.0, lt=1.0)
    checkpoint_every: int = Field(default=100, ge=1)
    keep_last: int = Field(default=10, ge=1)

    # Decoding
    mode: DecodeMode = Field(default=DecodeMode.BEAM)
    beam: int = Field(default=4, ge=1)
    alpha: float = Field(default=0.6, ge=0.0)
    decode_max_len: int = Field(default=30, ge=1)

    # Toy data
    task: ToyTask = Field(default=ToyTask.REVERSE)
    task_symbols: int = Field(default=20, ge=1)
    task_min_len: int = Field(default=3, ge=1)
    task_max_len: int = Field(default=10, ge=1)
    task_size: int = Field(default=2000, ge=10)
    rot_k: int = Field(default=1, ge=0)

    # Selector
    selector_layers: int = Field(default=2, ge=1)
    selector_heads: int = Field(default=4, ge=1)
    selector_d_ff: int = Field(default=64, ge=1)
    selector_alpha: float = Field(default=1.0, ge=0.0)
    selector_beta: float = Field(default=2.0, gt=0.0)
    selector_lambda: float = Field(default=0.5, ge=0.0, le=1.0)
    selector_threshold: float = Field(default=0.5, gt=0.0, lt=1.0)
    selector_lr: float = Field(default=0.1, ge=0.0)
    selector_momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    selector_epochs: int = Field(default=20, ge=1)
    selector_batch_size: int = Field(default=32, ge=1)

    @classmethod
    def get_config_path(cls) -> Path:
        """Platform-specific default config file (e.g. ~/.config/tiedmulti/settings.conf)."""
        config_dir = Path(user_config_dir("tiedmulti"))
        config_dir.mkdir(parents=True, exist_ok=True)
        return config_dir / "settings.conf"

    @classmethod
    def get_data_dir(cls) -> Path:
        """Default root for run artefacts when no --out is given."""
        return Path(user_data_dir("tiedmulti"))

    @classmethod
    def parse_config_text(cls, text: str) -> dict[str, str]:
        """Parse line-based `key=value` text. Blank lines and `#` comments are skipped."""
        values: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or not key:
                raise ConfigurationError(f"line {lineno}: expected key=value, got {raw!r}")
            if key not in cls.model_fields:
                raise ConfigurationError(f"line {lineno}: unknown setting {key!r}")
            values[key] = value.strip()
        return values

    @classmethod
    def load_from_file(cls, path: Path | None = None) -> "Settings | None":
        """
        Load settings from a key=value file if it exists.
        Values also present in the environment are left to the environment;
        empty values mean "unset".
        Returns Settings instance or None if file not found.
        """
        config_path = path or cls.get_config_path()
        if not config_path.exists():
            return None
        data = cls.parse_config_text(config_path.read_text(encoding="utf-8"))
        data = {
            k: v
            for k, v in data.items()
            if v and f"{ENV_PREFIX}{k.upper()}" not in os.environ
        }
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigurationError(f"invalid config file {config_path}: {e}") from e

    def save_to_file(self, path: Path | None = None) -> Path:
        """Write every setting as key=value, sorted by key."""
        config_path = path or self.get_config_path()
        config_path.parent.mkdir(parents=True, exist_ok=True)
        lines = []
        for key, value in sorted(self.model_dump(mode="json").items()):
            lines.append(f"{key}={'' if value is None else value}")
        config_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return config_path

    def with_overrides(self, **overrides: Any) -> "Settings":
        """Apply CLI flags on top of these settings; None means 'not given'."""
        given = {k: v for k, v in overrides.items() if v is not None}
        if not given:
            return self
        try:
            return type(self).model_validate({**self.model_dump(), **given})
        except ValidationError as e:
            raise ConfigurationError(str(e)) from e

    def model_settings(self) -> ModelConfig:
        return _build(
            ModelConfig,
            enc_layers=self.enc_layers,
            dec_layers=self.dec_layers,
            d_model=self.d_model,
            heads=self.heads,
            d_ff=self.d_ff,
            vocab=self.vocab,
            max_len=self.max_len,
            recurrent_stacking=self.recurrent_stacking,
            dropout=self.dropout,
        )

    def training_settings(self) -> TrainingConfig:
        return _build(
            TrainingConfig,
            steps=self.steps,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            warmup_steps=min(self.warmup_steps, self.steps),
            label_smoothing=self.label_smoothing,
            seed=self.seed,
            checkpoint_every=self.checkpoint_every,
            keep_last=self.keep_last,
        )

    def beam_settings(self) -> BeamConfig:
        return _build(BeamConfig, beam=self.beam, alpha=self.alpha, max_len=self.decode_max_len)

    def selector_settings(self) -> SelectorConfig:
        return _build(
            SelectorConfig,
            layers=self.selector_layers,
            heads=self.selector_heads,
            d_ff=self.selector_d_ff,
            alpha=self.selector_alpha,
            beta=self.selector_beta,
            interpolation=self.selector_lambda,
            threshold=self.selector_threshold,
            learning_rate=self.selector_lr,
            momentum=self.selector_momentum,
            epochs=self.selector_epochs,
            batch_size=self.selector_batch_size,
            seed=self.seed,
        )

    def toy_settings(self) -> ToyTaskSpec:
        return _build(
            ToyTaskSpec,
            task=self.task,
            symbols=self.task_symbols,
            min_len=self.task_min_len,
            max_len=self.task_max_len,
            size=self.task_size,
            rot_k=self.rot_k,
            seed=self.seed,
        )


def _build(model: type[_ConfigT], **values: Any) -> _ConfigT:
    try:
        return model(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid {model.__name__}: {e}") from e
