"""Exception hierarchy shared across the package.

Each family maps to a CLI exit code: configuration problems exit 2,
numerical failures (factorization, ill-conditioned solves) exit 3, and
simulation blow-ups exit 4.
"""


class RoughControlError(Exception):
    """Base class for package errors."""

    exit_code = 1


class ConfigError(RoughControlError):
    """Invalid configuration file, option value, or argument combination."""

    exit_code = 2


class GridError(ConfigError):
    """Time grids that are not nested, not increasing, or mismatched."""


class NumericError(RoughControlError):
    """Numerical failure in a factorization, solve, or quadrature."""

    exit_code = 3


class FactorizationError(NumericError):
    """Covariance matrix not numerically positive definite."""

    def __init__(self, message, suggested_jitter=None):
        super().__init__(message)
        self.suggested_jitter = suggested_jitter


class SimulationError(RoughControlError):
    """Non-finite state encountered during forward simulation."""

    exit_code = 4

    def __init__(self, message, path_index=None, step=None):
        super().__init__(message)
        self.path_index = path_index
        self.step = step
