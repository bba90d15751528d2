"""Exception types raised by the library and mapped to CLI exit codes."""


class ValidationError(ValueError):
    """Invalid user-facing parameter. ``field`` names the offending input."""

    exit_code = 2

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class ContractError(ValueError):
    """Internal precondition violated (dimension mismatch, wrong band structure)."""

    exit_code = 2


class NumericalError(ArithmeticError):
    """An iterative kernel failed to converge or produced an inaccurate result."""

    exit_code = 3


class CriticalRangeError(ValueError):
    """The derivative minimum sits on the sweep boundary."""

    exit_code = 4
