"""Exception and warning types raised across the package."""


class MultAdvError(Exception):
    """Base class for all package errors."""


class NonHermitian(MultAdvError, ValueError):
    pass


class NonConvergent(MultAdvError, ArithmeticError):
    pass


class NotPositiveDefinite(MultAdvError, ValueError):
    pass


class ShapeMismatch(MultAdvError, ValueError):
    pass


class DimensionMismatch(MultAdvError, ValueError):
    pass


class NonUnitary(MultAdvError, ValueError):
    pass


class ParseError(MultAdvError, ValueError):
    """Malformed truth-table file. Carries ``line`` and ``column`` (1-based)."""

    def __init__(self, message, line=None, column=None):
        loc = f"line {line}" if line is not None else ""
        if column is not None:
            loc += f", column {column}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.line = line
        self.column = column


class InvariantViolation(MultAdvError, ValueError):
    pass


class IndexOutOfRange(MultAdvError, IndexError):
    pass


class BadParameters(MultAdvError, ValueError):
    pass


class TooLarge(MultAdvError, ValueError):
    pass


class ImaginaryResidue(MultAdvError, ValueError):
    pass


class IncompleteProjectors(MultAdvError, ValueError):
    pass


class ZeroDenominator(MultAdvError, ZeroDivisionError):
    pass


class LambdaOutOfRange(MultAdvError, ValueError):
    pass


class VacuousBound(MultAdvError, ValueError):
    pass


class TrivialRatio(MultAdvError, ValueError):
    pass


class AllBlocksTrivial(MultAdvError, ValueError):
    pass


class BlockSingular(MultAdvError, ValueError):
    pass


class DegenerateBoundWarning(UserWarning):
    """The error-discount factor of a bound is non-positive; value clamped to 0."""


class DegenerateAdversaryWarning(UserWarning):
    """A construction collapsed to a trivial matrix (e.g. q == 1)."""
