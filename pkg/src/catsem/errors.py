"""Exception hierarchy shared by every module.

Each error maps onto a CLI exit code: ``BudgetError`` subclasses exit with 3,
everything else derived from ``CatsemError`` exits with 2.
"""


class CatsemError(ValueError):
    """Base class for malformed input and contract violations."""


class BudgetError(CatsemError):
    """An enumeration would exceed its configured budget."""


class SizeBudgetExceeded(BudgetError):
    pass


class CompositionMismatch(CatsemError):
    pass


class DomainMismatch(CatsemError):
    pass


class CodomainMismatch(CatsemError):
    pass


class NotAProductDomain(CatsemError):
    pass


class NotAnExponentialCodomain(CatsemError):
    pass


class NotASubset(CatsemError):
    pass


class MalformedTable(CatsemError):
    pass


class IncoherentCone(CatsemError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MissingProducts(CatsemError):
    pass


class NoTerminalForAdjunctionCheck(CatsemError):
    pass


class ShapeMismatch(CatsemError):
    pass


class NotParallel(CatsemError):
    pass


class BudgetZeroPaths(BudgetError):
    pass


class UnknownGenerator(CatsemError):
    pass


class MissingWitness(CatsemError):
    pass


class MissingAtom(CatsemError):
    pass


class ParseError(CatsemError):
    """Syntax error carrying the offending character offset."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
        self.position = position


class UnboundVariable(CatsemError):
    pass


class TypeMismatch(CatsemError):
    def __init__(self, message, expected=None, actual=None, term=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual
        self.term = term
