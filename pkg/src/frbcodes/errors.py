"""Exception types shared across the package."""


class FrbError(Exception):
    """Base class for all package errors."""


# gf
class NotPrimePower(FrbError, ValueError):
    pass


class NoModulus(FrbError):
    pass


class FieldMismatch(FrbError, TypeError):
    pass


class DivisionByZero(FrbError, ZeroDivisionError):
    pass


# designs
class EllTooLarge(FrbError, ValueError):
    pass


# incidence
class ParseError(FrbError, ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class IndexOutOfRange(FrbError, IndexError):
    pass


# analysis
class KOutOfRange(FrbError, ValueError):
    pass


class EmptyColumn(FrbError, ValueError):
    pass


class DeltaTooLarge(FrbError, ValueError):
    pass


class BadFamily(FrbError, ValueError):
    pass


# mds
class FieldTooSmall(FrbError, ValueError):
    pass


class BadDimension(FrbError, ValueError):
    pass


class LengthMismatch(FrbError, ValueError):
    pass


class InsufficientSymbols(FrbError):
    pass


class Inconsistent(FrbError):
    pass


# dss
class NoDistinctHelpers(FrbError):
    pass


class Unservable(FrbError):
    """A batch request has no one-symbol-per-node assignment.

    ``certificate`` is a :class:`frbcodes.analysis.Witness` whose columns
    are a sub-request with too few alive neighbours.
    """

    def __init__(self, message: str, certificate):
        self.certificate = certificate
        super().__init__(message)
