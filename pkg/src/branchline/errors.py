"""Exception hierarchy shared across the package.

Two families matter to callers: ``ValidationError`` covers bad user input
(configs, bounds, file schemas) and ``NumericalError`` covers failures of
the math itself (stub poles, diverging training). The CLI maps them to
exit codes 2 and 3 respectively.
"""


class BranchlineError(Exception):
    """Base class for all package errors."""


class ValidationError(BranchlineError, ValueError):
    """Invalid argument, geometry, bounds, or dataset content."""


class ConfigError(ValidationError):
    """Malformed or inconsistent run configuration."""


class SchemaError(ValidationError):
    """File does not match the expected schema."""


class UnsupportedVersionError(SchemaError):
    """Persisted file carries a format version this build cannot read."""


class OutOfRangeError(ValidationError):
    """Requested target falls outside the achievable range."""


class TopologyMismatchError(ValidationError):
    """Model trained for one topology used with another."""


class NumericalError(BranchlineError, ArithmeticError):
    """Internal numerical failure."""


class SingularStubError(NumericalError):
    """Stub evaluated at a pole of its input admittance."""

    def __init__(self, message: str, frequency_index: int | None = None):
        super().__init__(message)
        self.frequency_index = frequency_index


class DegenerateNetworkError(NumericalError):
    """ABCD matrix cannot be converted to reflection/transmission form."""


class DivergenceError(NumericalError):
    """Training loss became non-finite."""

    def __init__(self, message: str, epoch: int | None = None):
        super().__init__(message)
        self.epoch = epoch
