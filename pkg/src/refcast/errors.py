"""Exception hierarchy.

``DataError`` and subclasses indicate bad input data (CLI exit code 1).
Bad parameters and flags raise plain ``ValueError`` (CLI exit code 2).
"""


class RefcastError(Exception):
    """Base class for package-specific errors."""


class DataError(RefcastError):
    """Input data violates the dataset contract."""


class IncompleteRecordError(DataError):
    """A record lacks the outcome fields needed for the requested measure."""


class EmptyClassError(DataError):
    """A reference class matched no usable records; forecasting is refused."""
