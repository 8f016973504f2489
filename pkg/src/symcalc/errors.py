"""Exception types shared across the package."""


class SymcalcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SymcalcError):
    """Syntax error in a term or type, with a character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class SortError(ParseError):
    """A term of the wrong syntactic category where another was required."""


class AddressError(SymcalcError):
    """An application-spine address that does not exist in the given term."""


class TypeCheckError(SymcalcError):
    """Term does not typecheck; carries the path of the offending subterm."""

    def __init__(self, message: str, path: tuple = ()):
        super().__init__(f"{message} (at subterm path {list(path)})")
        self.path = path


class StaleRedexError(SymcalcError):
    """A redex descriptor that no longer matches the term it is applied to."""


class BudgetExhaustedError(SymcalcError):
    """A step or node budget ran out before the operation finished.

    ``steps`` holds the partial trace accumulated so far and ``term`` the
    last term reached.
    """

    def __init__(self, message: str, term=None, steps=None):
        super().__init__(message)
        self.term = term
        self.steps = list(steps) if steps is not None else []


class PostponeError(SymcalcError):
    """Postponement could not complete (broken input chain or budget)."""
