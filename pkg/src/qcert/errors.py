"""Exception types raised across the package."""


class QCertError(Exception):
    """Base class for all package errors."""


class ModulusMismatch(QCertError, ValueError):
    pass


class NotAUnit(QCertError, ArithmeticError):
    pass


class TruncationError(QCertError, ValueError):
    """A series is too short for the requested window."""


class SupportViolation(QCertError, ValueError):
    pass


class QuotientParseError(QCertError, ValueError):
    pass


class PrefactorError(QCertError, ValueError):
    """The q-prefactor of an eta-quotient is not an integer, or falls outside the window."""


class CacheCorruption(QCertError, IOError):
    pass


class ConsistencyError(QCertError, AssertionError):
    """An internal cross-check between two independent routes disagreed."""
