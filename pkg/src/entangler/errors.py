"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` and configuration
problems from :class:`ConfigError`; the CLI maps the two families onto
different exit codes.
"""


class EntanglerError(Exception):
    pass


class NumericalError(EntanglerError):
    pass


class DegenerateDenominator(NumericalError):
    """M^3 - W^3 vanishes: the adiabatic coupling formulas diverge."""


class NotTheSecularMatrix(NumericalError):
    pass


class StepFailure(NumericalError):
    """Fixed-step integration failed its h vs h/2 error check."""


class ConvergenceFailure(NumericalError):
    pass


class LeakageOutOfSubspace(NumericalError):
    pass


class NotNormalized(NumericalError):
    pass


class InvalidDensity(NumericalError):
    pass


class ConfigError(EntanglerError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
