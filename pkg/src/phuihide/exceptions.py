"""Exception hierarchy.

The CLI maps these onto exit codes, so every failure raised by the library
belongs to exactly one of the families below.
"""


class PhuiError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PhuiError, ValueError):
    """Invalid thresholds, parameters or run configuration."""


class ParseError(PhuiError, ValueError):
    """Malformed dataset, utility table or itemset file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AbsentItemError(PhuiError, KeyError):
    """The requested item does not occur in the requested transaction."""


class EmptySupportError(PhuiError, ValueError):
    """An itemset that must occur in the dataset occurs nowhere."""


class UndefinedMetricError(PhuiError, ZeroDivisionError):
    """A similarity metric has a zero denominator."""


class InvariantError(PhuiError, AssertionError):
    """Internal bookkeeping diverged from a from-scratch recomputation."""
