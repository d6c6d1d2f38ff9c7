"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract:
    1 -- usage / configuration errors
    2 -- data validation errors (parse failures, invariant violations)
    3 -- anything else that goes wrong at runtime
"""


class RcevalError(Exception):
    """Base class for all package errors."""


class UsageError(RcevalError):
    """Bad flags, bad config files, unknown metric names."""


class DataError(RcevalError):
    """Base for problems with input data."""


class ParseError(DataError):
    """File could not be parsed; message carries the file/record locus."""


class ValidationError(DataError):
    """A record violated a type invariant."""


class PreconditionError(RcevalError):
    """An operation was called with inputs that violate its preconditions."""


class UndefinedCorrelationError(RcevalError):
    """Pearson correlation is undefined (zero variance on one side)."""


class MissingScoreError(RcevalError):
    """An imported score file has no entry for the requested instance."""


class PackingLengthError(RcevalError):
    """Packed input cannot fit the encoder length budget."""

    def __init__(self, segment: str, message: str):
        super().__init__(message)
        self.segment = segment


class CheckpointError(RcevalError):
    """Checkpoint directory is missing, truncated, or incompatible."""


class TrainingLockedError(RcevalError):
    """Another training run holds the checkpoint directory lock."""
