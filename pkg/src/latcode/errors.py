"""Exception types shared across the package."""


class LatcodeError(Exception):
    """Base class for all package-specific errors."""


class NotPrimePower(LatcodeError):
    """Field size is not a prime power."""


class DivisionByZero(LatcodeError, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


class TooLarge(LatcodeError):
    """Requested geometry exceeds the configured size guard."""


class RankDeficient(LatcodeError):
    """Generator matrix does not have full row rank."""


class ZeroColumn(LatcodeError):
    """Generator matrix contains an all-zero column."""


class NotSpanning(LatcodeError):
    """Point multiset does not span the ambient projective space."""


class SpectrumEmpty(LatcodeError):
    """Weight spectrum contains no admissible weights."""


class InconsistentBounds(LatcodeError):
    """Extension system bounds contradict each other."""


class UnboundedVariable(LatcodeError):
    """An operation requires finite upper bounds on all variables."""


class BlocksOverlap(LatcodeError):
    """Weight spectrum blocks overlap or are out of order."""


class BlocksRequired(LatcodeError):
    """Gap reformulation needs at least two spectrum blocks."""


class GroupTooLarge(LatcodeError):
    """Explicit group enumeration would exceed the size guard."""


class FormatError(LatcodeError):
    """A text file does not conform to the documented format."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class VersionMismatch(LatcodeError):
    """Database file was written by an incompatible version."""


class UsageError(LatcodeError):
    """Invalid command-line arguments."""
