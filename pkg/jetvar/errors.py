"""Error hierarchy shared by the engine and the command line."""


class JetvarError(Exception):
    """Base class of every error raised by jetvar."""

    exit_code = 1


class JetIndexError(JetvarError, IndexError):
    pass


class DimensionError(JetvarError, ValueError):
    pass


class UnboundVariableError(JetvarError, LookupError):
    def __init__(self, coordinate):
        super().__init__(f"no value bound for coordinate {coordinate!r}")
        self.coordinate = coordinate


class ShapeError(JetvarError, ValueError):
    """A form does not have the shape an operation needs."""

    exit_code = 3


class DomainError(JetvarError, ValueError):
    pass


class PreconditionError(JetvarError, ValueError):
    exit_code = 3


class NotVariationalError(PreconditionError):
    """Raised for a source form whose Helmholtz components do not all vanish."""

    def __init__(self, message, helmholtz):
        super().__init__(message)
        self.helmholtz = helmholtz


class NotTrivialError(PreconditionError):
    """Raised for a Lagrangian whose Euler-Lagrange form does not vanish."""

    def __init__(self, message, source):
        super().__init__(message)
        self.source = source


class ParseError(JetvarError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class UnknownIdentifierError(ParseError):
    pass


class SubscriptError(ParseError):
    pass


class InvariantViolation(JetvarError, AssertionError):
    exit_code = 4
