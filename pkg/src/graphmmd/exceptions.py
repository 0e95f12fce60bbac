"""Exception types shared across the package."""


class GraphMMDError(Exception):
    """Base class for all package errors."""


class DatasetError(GraphMMDError, ValueError):
    """A dataset file could not be parsed or contains an invalid graph."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidKernelError(GraphMMDError, ValueError):
    """Kernel configuration is not a valid (p.s.d.) kernel or is malformed."""


class ConstantSeriesError(GraphMMDError, ValueError):
    """A correlation was requested on a series with zero variance."""

    code = "CONSTANT_SERIES"


class SpectrumError(GraphMMDError, ArithmeticError):
    """Eigenvalue computation failed or produced values outside [0, 2]."""
