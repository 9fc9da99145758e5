"""Exception hierarchy shared across the package."""


class RankAdaptError(Exception):
    """Base class for all package errors."""


class ShapeError(RankAdaptError):
    """Input array dimensions don't match the parameter shapes."""


class VocabError(RankAdaptError):
    """An n-gram id falls outside the corpus vocabulary."""


class ValidationError(RankAdaptError):
    """A dataset or config object violates a structural invariant."""


class ParseError(RankAdaptError):
    """A serialized file could not be decoded."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class SplitError(RankAdaptError):
    """A temporal split is impossible (all examples share one day)."""


class ConfigError(RankAdaptError):
    """A configuration value is invalid or inconsistent."""


class NumericError(RankAdaptError):
    """A computation produced a non-finite value."""


class ConvergenceError(RankAdaptError):
    """An iterative solver ran out of iterations.

    Carries the last iterate so callers can inspect how close it got.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DivergenceError(RankAdaptError):
    """Training produced a non-finite or runaway loss.

    Carries the step number and the last finite checkpoint.
    """

    def __init__(self, message, step=None, last_checkpoint=None):
        super().__init__(message)
        self.step = step
        self.last_checkpoint = last_checkpoint


class CheckpointError(RankAdaptError):
    """A checkpoint is unreadable or incompatible with the active config."""
