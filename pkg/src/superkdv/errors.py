"""Exception types shared across the package."""


class SuperKdVError(Exception):
    """Base class for all package errors."""


class DescriptorMismatch(SuperKdVError):
    """Operands built over different algebra descriptors."""


class GradingError(SuperKdVError):
    """Operation violates the even/odd grading (e.g. a bare odd*odd product)."""


class NonFiniteFieldError(SuperKdVError):
    """A field operation encountered nan or inf samples."""


class StabilityError(SuperKdVError):
    """Requested time step exceeds the stability guard."""

    def __init__(self, message, suggested_dt):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class NumericalBlowup(SuperKdVError):
    """Non-finite values appeared during time integration."""

    def __init__(self, message, last_state, step, time):
        super().__init__(message)
        self.last_state = last_state
        self.step = step
        self.time = time


class ExpressionSyntaxError(SuperKdVError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
