"""Typed configurations for models, training, decoding, the selector and toy data."""

from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from tiedmulti.core.kinds import Aggregation, ToyTask


class ModelConfig(BaseModel):
    """Architecture of a tied-multi Transformer with N encoder and M decoder layers."""

    model_config = ConfigDict(frozen=True)

    enc_layers: int = Field(default=3, ge=1, description="N")
    dec_layers: int = Field(default=3, ge=1, description="M")
    d_model: int = Field(default=32, ge=1)
    heads: int = Field(default=4, ge=1)
    d_ff: int = Field(default=64, ge=1)
    vocab: int = Field(default=32, ge=5, description="Shared source/target vocabulary size")
    max_len: int = Field(default=32, ge=3, description="Positional-encoding horizon")
    recurrent_stacking: bool = False
    dropout: float = Field(default=0.0, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _heads_divide_width(self) -> Self:
        if self.d_model % self.heads != 0:
            raise ValueError(f"d_model={self.d_model} is not divisible by heads={self.heads}")
        return self

    @property
    def combinations(self) -> int:
        """K = N x M."""
        return self.enc_layers * self.dec_layers

    def with_depth(self, enc_layers: int, dec_layers: int) -> "ModelConfig":
        """Same architecture with a different stack depth."""
        return self.model_copy(update={"enc_layers": enc_layers, "dec_layers": dec_layers})

    @classmethod
    def transformer_base(cls, *, recurrent_stacking: bool = False) -> "ModelConfig":
        """Transformer-base with a shared 32k vocabulary and 6+6 layers."""
        return cls(
            enc_layers=6,
            dec_layers=6,
            d_model=512,
            heads=8,
            d_ff=2048,
            vocab=32_000,
            max_len=256,
            recurrent_stacking=recurrent_stacking,
        )


class TrainingConfig(BaseModel):
    """Optimisation schedule for one training run."""

    model_config = ConfigDict(frozen=True)

    steps: int = Field(default=2000, gt=0)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(
        default=2.0, ge=0.0, description="Scale of the inverse-square-root schedule"
    )
    warmup_steps: int = Field(default=400, ge=0)
    label_smoothing: float = Field(default=0.1, ge=0.0, lt=1.0)
    aggregation: Aggregation = Aggregation.MEAN
    seed: int = 1234
    checkpoint_every: int = Field(default=100, ge=1)
    keep_last: int = Field(default=10, ge=1)

    @model_validator(mode="after")
    def _warmup_within_steps(self) -> Self:
        if self.warmup_steps > self.steps:
            raise ValueError(f"warmup_steps={self.warmup_steps} exceeds steps={self.steps}")
        return self


class BeamConfig(BaseModel):
    """Search settings; defaults are beam 4 and length penalty 0.6."""

    model_config = ConfigDict(frozen=True)

    beam: int = Field(default=4, ge=1)
    alpha: float = Field(default=0.6, ge=0.0)
    max_len: int = Field(default=30, ge=1, description="Cap on emitted tokens")


class SelectorConfig(BaseModel):
    """Layer-combination classifier and its training loss."""

    model_config = ConfigDict(frozen=True)

    layers: int = Field(default=2, ge=1)
    heads: int = Field(default=4, ge=1)
    d_ff: int = Field(default=64, ge=1)
    alpha: float = Field(default=1.0, ge=0.0, description="Class-weight exponent")
    beta: float = Field(default=2.0, gt=0.0, description="F-measure weight")
    interpolation: float = Field(default=0.5, ge=0.0, le=1.0, description="BCE share (lambda)")
    threshold: float = Field(default=0.5, gt=0.0, lt=1.0)
    learning_rate: float = Field(default=0.1, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    epochs: int = Field(default=20, ge=1)
    batch_size: int = Field(default=32, ge=1)
    seed: int = 1234


class ToyTaskSpec(BaseModel):
    """A synthetic parallel corpus."""

    model_config = ConfigDict(frozen=True)

    task: ToyTask = ToyTask.REVERSE
    symbols: int = Field(default=20, ge=1, description="Number of distinct source symbols")
    min_len: int = Field(default=3, ge=1)
    max_len: int = Field(default=10, ge=1)
    size: int = Field(default=2000, ge=10)
    rot_k: int = Field(default=1, ge=0, description="Shift used by the rot task")
    seed: int = 1234

    @model_validator(mode="after")
    def _length_range(self) -> Self:
        if self.min_len > self.max_len:
            raise ValueError(f"min_len={self.min_len} exceeds max_len={self.max_len}")
        return self

    def fits(self, model: ModelConfig) -> bool:
        """Sentences plus begin/end markers fit the positional horizon and the vocabulary."""
        return self.max_len <= model.max_len - 2 and self.symbols + 4 <= model.vocab
