"""Exception hierarchy shared by all modules."""


class TLSDecayError(Exception):
    """Base class; ``context`` records module, model kind and time of origin."""

    def __init__(self, message, **context):
        self.context = {k: v for k, v in context.items() if v is not None}
        if self.context:
            where = ", ".join(f"{k}={v}" for k, v in self.context.items())
            message = f"{message} [{where}]"
        super().__init__(message)


class InvalidInputError(TLSDecayError, ValueError):
    pass


class NumericalFailure(TLSDecayError, ArithmeticError):
    """Quadrature or iteration did not reach its tolerance."""

    def __init__(self, message, residual=None, **context):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual estimate {residual:.3e})"
        super().__init__(message, **context)


class DegenerateCalibrationError(TLSDecayError, ValueError):
    pass


class DegenerateShiftError(TLSDecayError, ZeroDivisionError):
    pass


class RootNotFoundError(NumericalFailure):
    pass


class AmplitudeRangeError(TLSDecayError, OverflowError):
    pass


class ConfigValidationError(TLSDecayError, ValueError):
    """Carries every validation problem found, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))
