"""Exception types shared across the package.

Parse/validation problems raise distinct classes so callers (and the CLI
exit-code mapping) can tell them apart without string matching.
"""


class DairyPvError(Exception):
    """Base class for all package errors."""


class ValidationError(DairyPvError, ValueError):
    """A domain invariant or precondition was violated; message names the field."""


class SeriesError(DairyPvError, ValueError):
    """Base class for CSV year-series parse problems."""


class MissingHeaderError(SeriesError):
    """Input is empty or its header row does not match the expected columns."""


class DuplicateYearError(SeriesError):
    """The same calendar year appears on more than one row."""

    def __init__(self, message, year=None, line=None):
        super().__init__(message)
        self.year = year
        self.line = line


class YearGapError(SeriesError):
    """Years are not contiguous and increasing; carries the missing years."""

    def __init__(self, message, missing_years=(), line=None):
        super().__init__(message)
        self.missing_years = tuple(missing_years)
        self.line = line


class BadValueError(SeriesError):
    """A cell could not be parsed as the expected number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class CoverageGapError(DairyPvError, ValueError):
    """A series does not cover every simulated year; carries the missing years."""

    def __init__(self, message, missing_years=()):
        super().__init__(message)
        self.missing_years = tuple(missing_years)


class CalibrationFailedError(DairyPvError, RuntimeError):
    """Calibration could not produce a finite loss anywhere in the search space."""
