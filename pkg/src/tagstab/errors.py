"""Exception types shared across the package."""


class TagStabError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(TagStabError, ValueError):
    """An argument value lies outside its documented domain."""


class DataError(TagStabError, ValueError):
    """Input data cannot support the requested computation."""


class EmptyInputError(DataError):
    """An operation received an empty stream, snapshot, or sample."""


class InsufficientDataError(DataError):
    """Data is present but too short or too degenerate to proceed."""


class IngestionError(DataError):
    """A file or row set could not be ingested."""
