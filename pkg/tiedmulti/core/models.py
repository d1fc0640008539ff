"""Core domain models."""

from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any

from pydantic import BaseModel, Field

from tiedmulti.core.kinds import DecodeMode
from tiedmulti.utils.exceptions import CombinationError


@dataclass(frozen=True)
class LayerCombination:
    """Encoder depth n and decoder depth m used for one decode (both 1-based)."""

    n: int
    m: int

    def check(self, enc_layers: int, dec_layers: int) -> "LayerCombination":
        """Return self if it fits an N x M model, raise CombinationError otherwise."""
        if not (1 <= self.n <= enc_layers and 1 <= self.m <= dec_layers):
            raise CombinationError(
                f"combination ({self.n},{self.m}) outside the {enc_layers}x{dec_layers} model"
            )
        return self

    def index(self, dec_layers: int) -> int:
        """Row-major position of this combination (m varies fastest)."""
        return (self.n - 1) * dec_layers + (self.m - 1)

    @classmethod
    def from_index(cls, k: int, dec_layers: int) -> "LayerCombination":
        return cls(n=k // dec_layers + 1, m=k % dec_layers + 1)

    @classmethod
    def parse(cls, text: str) -> "LayerCombination":
        """Parse the `n,m` form used on the command line."""
        parts = text.replace(" ", "").split(",")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise CombinationError(f"expected 'n,m', got {text!r}")
        return cls(n=int(parts[0]), m=int(parts[1]))

    def __str__(self) -> str:
        return f"{self.n},{self.m}"


def all_combinations(enc_layers: int, dec_layers: int) -> Iterator[LayerCombination]:
    """All N x M combinations in row-major order, m fastest-varying."""
    for n in range(1, enc_layers + 1):
        for m in range(1, dec_layers + 1):
            yield LayerCombination(n=n, m=m)


@dataclass(frozen=True)
class SentencePair:
    """One line of a parallel corpus."""

    source: str
    target: str


@dataclass
class DecodeRecord:
    """Output and wall-clock cost of decoding one sentence."""

    sentence_id: int
    combination: LayerCombination
    tokens: list[int]
    seconds: float
    mode: DecodeMode
    text: str = ""
    error: str | None = None


@dataclass
class MultiLabelExample:
    """Selector training example: a source sentence and its K-dimensional label vector."""

    tokens: list[int]
    labels: list[int]
    text: str = ""
    sample_weight: float = 1.0

    def __post_init__(self) -> None:
        if not any(self.labels):
            raise ValueError("a selector example needs at least one positive label")


class CostBenefitRow(BaseModel):
    """Quality and cost of one layer combination over a test set."""

    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    bleu: float = Field(..., ge=0.0, le=100.0)
    total_seconds: float = Field(..., ge=0.0)
    mean_seconds: float = Field(..., ge=0.0)
    sentences: int = Field(..., ge=0)
    failures: int = Field(default=0, ge=0)
    vanilla_bleu: float | None = Field(default=None, ge=0.0, le=100.0)
    vanilla_seconds: float | None = Field(default=None, ge=0.0)


class CostBenefitReport(BaseModel):
    """K rows of BLEU and decoding time for one model (one row per combination)."""

    model_kind: str
    checkpoint: str
    mode: DecodeMode
    enc_layers: int = Field(..., ge=1)
    dec_layers: int = Field(..., ge=1)
    load_seconds: float = Field(default=0.0, ge=0.0)
    rows: list[CostBenefitRow]

    def row(self, combination: LayerCombination) -> CostBenefitRow:
        return self.rows[combination.index(self.dec_layers)]


class TrainSummary(BaseModel):
    """Provenance of one training run, written next to its checkpoints."""

    kind: str
    model: dict[str, Any]
    training: dict[str, Any]
    pairs: int = Field(..., ge=0)
    steps: int = Field(..., ge=0)
    final_loss: float
    seconds: float = Field(..., ge=0.0)
    checkpoints: list[str] = Field(default_factory=list)
    averaged: str | None = None


class EvaluationResult(BaseModel):
    """Corpus scores of one decode run against its references."""

    bleu: float = Field(..., ge=0.0, le=100.0)
    chrf: float = Field(..., ge=0.0, le=1.0, description="Mean sentence chrF")
    sentences: int = Field(..., ge=0)
    failures: int = Field(default=0, ge=0)
    total_seconds: float = Field(default=0.0, ge=0.0)


class OracleReport(BaseModel):
    """Per-sentence oracle selection over one model family's K decode logs."""

    family: str
    enc_layers: int = Field(..., ge=1)
    dec_layers: int = Field(..., ge=1)
    sentences: int = Field(..., ge=0)
    histogram: list[int]
    oracle_bleu: float
    baseline_bleu: float
    oracle_seconds: float = Field(..., ge=0.0)
    baseline_seconds: float = Field(..., ge=0.0)


class SizeRow(BaseModel):
    model: str
    members: int = Field(..., ge=1, description="Configurations summed into this row")
    learnable: int = Field(..., ge=0)
    checkpoint_variables: int = Field(..., ge=0)
    relative: float = Field(..., ge=0.0)


class SizeReport(BaseModel):
    """Parameter counts relative to the tied-multi model."""

    reference: str
    rows: list[SizeRow]
    rs_fewer_than_vanilla_sum: float
    rs_fewer_than_rs_sum: float

    def row(self, model: str) -> SizeRow:
        for r in self.rows:
            if r.model == model:
                return r
        raise KeyError(model)


class SelectionReport(BaseModel):
    """Decoding with the combination the classifier picks per sentence."""

    sentences: int = Field(..., ge=0)
    threshold: float
    choices: list[int] = Field(..., description="How often each combination was picked")
    backoffs: int = Field(default=0, ge=0)
    selected_bleu: float
    selected_seconds: float = Field(..., ge=0.0)
    selector_seconds: float = Field(..., ge=0.0)
    baseline_bleu: float
    baseline_seconds: float = Field(..., ge=0.0)
    oracle_bleu: float | None = None
    oracle_seconds: float | None = None


class GreedyBeamGrid(BaseModel):
    """Corpus BLEU of one child model at every combination, greedy and beam."""

    variant: str
    child: str
    distilled: bool
    greedy_bleu: list[float]
    beam_bleu: list[float]
    gap: list[float] = Field(..., description="greedy minus beam, per combination")


class DistillationReport(BaseModel):
    enc_layers: int = Field(..., ge=1)
    dec_layers: int = Field(..., ge=1)
    corpus_pairs: int = Field(..., ge=0)
    pseudo_pairs: int = Field(..., ge=0)
    skipped: int = Field(default=0, ge=0)
    variants: list[GreedyBeamGrid]

    def variant(self, name: str) -> GreedyBeamGrid:
        for v in self.variants:
            if v.variant == name:
                return v
        raise KeyError(name)


class TrainingTimeReport(BaseModel):
    """Training cost relative to the vanilla (N, M) model."""

    reference_seconds: float = Field(..., gt=0.0)
    vanilla_grid_seconds: float = Field(..., ge=0.0)
    vanilla_grid_models: int = Field(..., ge=0)
    tied_seconds: float | None = None
    vanilla_grid_ratio: float
    tied_ratio: float | None = None
