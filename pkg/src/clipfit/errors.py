"""Exception hierarchy shared across the engine.

Errors fall into three families that map onto CLI exit codes:
configuration (2), data (3), and numeric (4).
"""


class EngineError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(EngineError):
    """Bad run configuration: unknown mode, missing flag, absent path."""

    exit_code = 2


class DataError(EngineError):
    """Malformed or inconsistent input data."""

    exit_code = 3


class NumericError(EngineError):
    """Numerically invalid operation or value."""

    exit_code = 4


# numeric ------------------------------------------------------------------


class ZeroVectorError(NumericError):
    """Vector has numerically zero norm and cannot be normalized."""


class DimMismatchError(NumericError):
    """Operands disagree on embedding dimension or row count."""


class ShapeMismatchError(NumericError):
    """Parameter, gradient, and optimizer state shapes disagree."""


class NotFiniteError(NumericError):
    """NaN or infinity where finite values are required."""


class NotNormalizedError(NumericError):
    """Stored embedding deviates too far from unit norm."""


# data ---------------------------------------------------------------------


class ParseError(DataError):
    """Unreadable record in a manifest, registry, or binary file."""


class DuplicateIdError(DataError):
    """A record or embedding id occurs more than once."""


class MissingFieldError(DataError):
    """A required record field is absent or empty."""


class BatchTooSmallError(DataError):
    """Batch size is below the number of active data sources."""


class EmptyCaptionError(DataError):
    """Caption is empty where text is required."""


class EmptyTextError(DataError):
    """Text input is empty where tokens are required."""


class TokenOutOfRangeError(DataError):
    """Token id outside the embedding table."""


class InvalidTargetError(DataError):
    """Resize target is not a positive size."""


class CropTooLargeError(DataError):
    """Crop window exceeds the image bounds."""


class NotGrayscaleError(DataError):
    """Single-channel image required."""


class DuplicateLabelError(DataError):
    """Class label list contains a repeat."""


class EmptyLabelSetError(DataError):
    """Class label list is empty."""


class MissingTruthError(DataError):
    """A query has no ground-truth entry."""


class EmptyTruthSetError(DataError):
    """No query carries a non-empty ground-truth set."""


class EmptyRelevanceError(DataError):
    """A retrieval query has no relevant gallery item."""


class IoError(DataError):
    """Underlying file operation failed."""


class BadMagicError(DataError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(DataError):
    """File format version is not supported."""


class CorruptRecordError(DataError):
    """Binary record is truncated or inconsistent; message carries the byte offset."""
