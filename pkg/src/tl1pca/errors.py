"""Exception taxonomy shared across the package.

The three classes map onto the CLI exit codes: configuration problems
(bad hyperparameters, malformed flags) exit 2, data problems (unreadable
files, shape mismatches, degenerate inputs) exit 3, and numeric failures
during iteration exit 4.
"""


class ConfigError(ValueError):
    """Invalid hyperparameter, option, or split specification."""


class DataError(ValueError):
    """Invalid, malformed, or degenerate input data."""


class NumericError(ArithmeticError):
    """Non-finite value or other numeric failure during computation."""
