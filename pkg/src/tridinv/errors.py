"""Exception types shared across the package."""


class TridinvError(Exception):
    """Base class for all errors raised by tridinv."""


class DomainError(TridinvError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class SingularMatrix(TridinvError, ArithmeticError):
    """The matrix (or a pivot along the way) is numerically singular."""


class IndexOutOfRange(TridinvError, IndexError):
    """A 1-based matrix index falls outside ``1..n``."""


class DimensionMismatch(TridinvError, ValueError):
    """An input vector does not have the length the model expects."""
