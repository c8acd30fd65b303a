"""Exception hierarchy shared across the package."""


class ResilError(Exception):
    """Base class for all errors raised by :mod:`resil`."""


class ValidationError(ResilError, ValueError):
    """Input data violates a documented invariant."""


class RangeError(ResilError, ValueError):
    """A time or window lies outside the series domain."""


class FormatError(ResilError, ValueError):
    """A document does not match any supported schema."""


class ParseError(FormatError):
    """Malformed JSON. Carries the line/column of the failure."""

    def __init__(self, msg, lineno=None, colno=None):
        super().__init__(msg)
        self.lineno = lineno
        self.colno = colno


class DegenerateFitError(ResilError, ValueError):
    """Too few samples for the requested number of segments."""


class EvaluationError(ResilError, ArithmeticError):
    """A metric cannot be evaluated, e.g. all kernel weights vanish."""
