"""Exception hierarchy shared across the package."""


class ViddialError(Exception):
    """Base class for all package errors."""


class DimensionError(ViddialError, ValueError):
    pass


class NumericError(ViddialError, ArithmeticError):
    pass


class ContractError(ViddialError, ValueError):
    """A documented precondition was violated by the caller."""


class ConfigError(ViddialError, ValueError):
    pass


class DataError(ViddialError, ValueError):
    """Input data is missing or inconsistent."""


class ParseError(DataError):
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class SamplingError(ViddialError, ValueError):
    pass
