"""Exception types raised by entkit."""


class EntkitError(Exception):
    """Base class for all entkit errors."""


class ValidationError(EntkitError, ValueError):
    """Malformed input: wrong shape, non-finite entries, bad normalization."""


class NotPSDError(ValidationError):
    """Operator has an eigenvalue below the negative tolerance."""


class PreconditionError(EntkitError, ValueError):
    """A mathematical precondition is violated.

    ``condition`` names the violated condition (e.g. ``"in_range"``,
    ``"is_preparable"``) so callers can report it without parsing the message.
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class NumericalError(EntkitError, ArithmeticError):
    """Two routes to the same quantity disagree beyond tolerance."""
