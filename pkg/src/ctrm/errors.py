"""Exception hierarchy shared by all ctrm modules."""


class CtrmError(Exception):
    """Base class for errors raised by this package."""


class DomainError(CtrmError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class UnsupportedModelError(CtrmError, TypeError):
    """The operation has no meaning for the given model family."""


class PathExhaustedError(CtrmError):
    """A query time lies beyond the last simulated renewal epoch."""


class AccuracyError(CtrmError, ArithmeticError):
    """A numerical routine could not certify its own accuracy."""
