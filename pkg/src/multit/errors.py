"""Exception types raised by the multit pipeline."""


class MultiTError(Exception):
    """Base class for all multit-specific errors."""


class EmptyOutlierSetError(MultiTError):
    """A Shell reference was requested for an empty outlier index set."""


class DegenerateNormalizationError(MultiTError):
    """A sample coincides exactly with its reference vector."""


class InvalidThresholdResultError(MultiTError):
    """Index sets passed to a scorer are unusable (e.g. no inliers)."""


class InsufficientPointsError(MultiTError):
    """An operation needs more data points than were supplied."""


class UndefinedMetricError(MultiTError):
    """A metric is undefined for the given inputs (e.g. single-class truth)."""


class DetectorError(MultiTError):
    """A plug-in detector failed to fit or predict."""


class IdxFormatError(MultiTError):
    """An IDX file could not be parsed; the message names the byte offset."""


class CsvFormatError(MultiTError):
    """A feature CSV could not be parsed; the message names the row."""
