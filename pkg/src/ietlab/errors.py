"""Exception hierarchy shared by every ietlab module."""


class IETLabError(Exception):
    """Base class for all ietlab errors."""


class ValidationError(IETLabError, ValueError):
    """Invalid input object (permutation, lengths, tuple, config field)."""


class DomainError(IETLabError, ValueError):
    """A point lies outside the domain of the map."""


class DegeneracyError(IETLabError, ArithmeticError):
    """A Rauzy tie or breakpoint coincidence was hit."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class IterationBudgetError(IETLabError, RuntimeError):
    """An orbit failed to return within the iteration budget."""


class BackendMismatchError(IETLabError, TypeError):
    """Objects from different group backends were combined."""
