"""Exception types shared across the package."""


class SparqlKbError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SparqlKbError):
    """Syntax error in a KB or query text, with 1-based position info."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnsatisfiableKbError(SparqlKbError):
    """Raised when an operation requires a satisfiable knowledge base."""


class QueryShapeError(SparqlKbError):
    """Query does not have the shape required by an operation."""
