"""Exception hierarchy shared by every module.

Each class maps to one CLI exit code (see :mod:`bandgan.cli`).
"""


class BandganError(Exception):
    exit_code = 1


class ConfigurationError(BandganError, ValueError):
    exit_code = 2


class PersistenceError(BandganError, OSError):
    exit_code = 3


class DimensionError(BandganError, ValueError):
    exit_code = 4


class DomainError(BandganError, ValueError):
    """A signal was handed to an operation expecting the other domain."""

    exit_code = 4


class TrainingError(BandganError, RuntimeError):
    exit_code = 5


class UsageError(BandganError, RuntimeError):
    exit_code = 6


class UndefinedMetricError(BandganError, ValueError):
    exit_code = 7
