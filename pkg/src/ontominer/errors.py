"""Exception types shared across the package."""


class OntominerError(Exception):
    pass


class ParseError(OntominerError):
    """Syntax or validation failure while reading a knowledge base file."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}" if line else message)


class UnsupportedAxiom(OntominerError):
    """The axiom uses a construct outside the accepted fragment."""


class InconsistentKB(OntominerError):
    """Raised when an operation requires a consistent knowledge base."""


class BranchLimitExceeded(OntominerError):
    """The number of live chase branches exceeded the configured cap."""


class EmptyReferenceConcept(OntominerError):
    """The reference concept has no cautious instances, so support is undefined."""
