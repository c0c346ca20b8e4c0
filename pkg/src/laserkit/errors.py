"""Exception hierarchy shared across the toolkit.

The CLI maps these onto its exit-code contract: DataError -> 2,
ConfigError -> 3, anything else -> 4.
"""


class LaserkitError(Exception):
    """Base class for all toolkit errors."""


class DataError(LaserkitError):
    """Malformed or inconsistent input data (corpora, datasets, matrices)."""


class ConfigError(LaserkitError):
    """Invalid configuration or argument values."""
