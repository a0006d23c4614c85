"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: plain ValueError (bad arguments or
preconditions) -> 1, DataError -> 2, NumericError -> 3.
"""


class AeidsError(Exception):
    """Base class for package-specific failures."""


class DataError(AeidsError):
    """Malformed or inconsistent input data (files, labels, columns)."""


class BundleError(DataError):
    """Malformed, truncated, or inconsistent model bundle file."""


class NumericError(AeidsError):
    """Numeric failure during fitting (non-finite loss, singular system)."""
