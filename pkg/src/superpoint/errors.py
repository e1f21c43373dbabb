"""Exception hierarchy shared by every module."""


class SuperpointError(Exception):
    """Base class for all library errors."""


class StructuralError(SuperpointError, ValueError):
    """Operands live in different algebras, or shapes do not match."""


class ParityError(SuperpointError, ValueError):
    pass


class DomainError(SuperpointError, ValueError):
    """A smooth function was evaluated (or differentiated) outside its domain."""


class NotInvertibleError(SuperpointError, ArithmeticError):
    def __init__(self, message, body_determinant=None):
        super().__init__(message)
        self.body_determinant = body_determinant


class NotCoprimeError(SuperpointError, ArithmeticError):
    pass


class NeedsHintError(SuperpointError):
    """The exact path found eigenvalues it cannot represent without a user hint."""


class ConditionViolation(SuperpointError):
    """A hypothesis of the map constructor (commutation or real spectrum) fails."""


class PreconditionError(SuperpointError, ValueError):
    pass


class InternalConsistencyError(SuperpointError, RuntimeError):
    pass


class ExpressionError(SuperpointError, ValueError):
    """An expression string could not be parsed; carries a 1-based column."""

    def __init__(self, message, text=None, column=None):
        where = f" at column {column}" if column is not None else ""
        super().__init__(f"{message}{where}" + (f" in {text!r}" if text is not None else ""))
        self.text = text
        self.column = column
