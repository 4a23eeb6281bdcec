"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: configuration and invocation problems
exit 1, unreadable or malformed data exits 2.
"""


class SubeventsError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(SubeventsError):
    """Bad configuration or invocation (missing keys, invalid values)."""


class InputFormatError(SubeventsError):
    """Unreadable or malformed input data."""
