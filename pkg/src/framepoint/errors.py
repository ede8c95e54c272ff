"""Exception types shared across the package."""


class FramepointError(Exception):
    """Base class for all framepoint errors."""


class DomainError(FramepointError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(FramepointError, ValueError):
    """Array shapes or grid lengths are inconsistent."""


class ConfigError(FramepointError, ValueError):
    """A configuration value is invalid or contradictory."""


class DatasetFormatError(FramepointError, ValueError):
    """A dataset file violates the JSONL record schema."""


class CheckpointFormatError(FramepointError, ValueError):
    """A model checkpoint file cannot be parsed or is inconsistent."""


class GenerationError(FramepointError, RuntimeError):
    """The synthetic generator cannot satisfy its constraints."""


class EvaluationError(FramepointError, ValueError):
    """Predictions and ground truth cannot be matched for scoring."""


class TrainingDivergedError(FramepointError, RuntimeError):
    """Training produced a non-finite loss."""
