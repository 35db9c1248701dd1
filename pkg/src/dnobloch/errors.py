"""Exception hierarchy. The CLI maps each family to an exit code."""


class DnoBlochError(Exception):
    pass


class ConfigError(DnoBlochError, ValueError):
    """Invalid user input: bad profile, bad truncation, unknown option."""


class AliasingError(DnoBlochError, ValueError):
    pass


class NumericalError(DnoBlochError, ArithmeticError):
    """A computation could not be carried out reliably."""


class SmallDivisorError(NumericalError):
    def __init__(self, message, mode=None, divisor=None):
        super().__init__(message)
        self.mode = mode
        self.divisor = divisor


class OracleConvergenceError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InstabilityError(NumericalError):
    pass


class InvariantViolation(DnoBlochError, AssertionError):
    """A structural property (Hermiticity, ordering, ...) failed at runtime."""
