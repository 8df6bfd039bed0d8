"""Exception hierarchy shared by every module of the package."""


class FockError(Exception):
    """Base class for all errors raised by :mod:`fockpart`."""


class InvalidDimension(FockError, ValueError):
    pass


class IncompatibleStates(FockError, ValueError):
    pass


class PauliViolation(FockError, ValueError):
    """A fermionic mode was asked to hold more than one excitation."""


class ZeroState(FockError, ValueError):
    pass


class NotModeOrdered(FockError, ValueError):
    """A distinguishable-particle tensor lies outside the canonically ordered
    occupation subspace, so it has no occupation-number view."""


class TruncationExceeded(FockError, ValueError):
    pass


class SymmetryViolation(FockError, ValueError):
    pass


class InvalidCut(FockError, ValueError):
    pass


class UnknownGalleryState(FockError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown gallery state"


class InvalidParameter(FockError, ValueError):
    pass


class ProgramSyntaxError(FockError):
    """Syntax error in a state program, with 1-based line and column."""

    def __init__(self, message, line, col, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {col}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnboundName(FockError, NameError):
    pass


class TypeMismatch(FockError, TypeError):
    pass


class DuplicateBinding(FockError, NameError):
    """A program binds the same name twice."""
