"""Enumerations shared across the toolkit."""

from enum import IntEnum, StrEnum


class ModelKind(StrEnum):
    """Training regimes for a translation model."""

    VANILLA = "vanilla"
    TIED_MULTI = "tied-multi"


class ChildKind(StrEnum):
    """Child architectures for the distillation pipeline."""

    TIED = "tied"
    TIED_RS = "tied-rs"


class DecodeMode(StrEnum):
    """Search strategies."""

    GREEDY = "greedy"
    BEAM = "beam"


class ToyTask(StrEnum):
    """Synthetic translation tasks standing in for a real corpus."""

    COPY = "copy"
    REVERSE = "reverse"
    ROT = "rot"
    SORT = "sort"


class Aggregation(StrEnum):
    """How the per-combination losses are folded into one objective."""

    MEAN = "mean"
    WEIGHTED = "weighted"


class Precision(StrEnum):
    """Floating point width of tensors."""

    FLOAT64 = "float64"
    FLOAT32 = "float32"


class SpecialToken(IntEnum):
    """Reserved ids at the start of every vocabulary."""

    PAD = 0
    BOS = 1
    EOS = 2
    CLS = 3
