"""Custom exceptions for the tiedmulti toolkit."""


class TiedMultiError(Exception):
    """Base exception for all tiedmulti errors."""

    def __init__(self, message: str) -> None:
        super().__init__(f"[tiedmulti] {message}")


class ConfigurationError(TiedMultiError):
    """Raised when a model, training, decoding or selector configuration is invalid."""


class ShapeError(TiedMultiError):
    """Raised when tensor shapes or extents do not fit an operation."""


class NumericalError(TiedMultiError):
    """Raised when non-finite values show up in a forward pass or a training step."""


class VocabularyError(TiedMultiError):
    """Raised for out-of-range token indices, unknown symbols or over-length inputs."""


class CombinationError(TiedMultiError):
    """Raised when an encoder/decoder layer combination is outside the model."""


class CheckpointError(TiedMultiError):
    """Raised when a checkpoint cannot be read, written or combined."""


class CorpusError(TiedMultiError):
    """Raised when a corpus, grid or dataset file is malformed."""


class DecodingError(TiedMultiError):
    """Raised when decoding a single sentence fails."""
