"""Exception types shared across the package."""


class PairnetError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(PairnetError):
    """Input data violates the expected structure (columns, class counts, record/class mapping)."""


class ParseError(PairnetError):
    """A cell or line could not be parsed. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyInputError(PairnetError):
    """An operation received no data to work on."""


class ParameterError(PairnetError):
    """An argument value is outside its valid range."""


class DimensionError(PairnetError):
    """Vector or matrix shapes do not match."""


class TrainingError(PairnetError):
    """Training preconditions are not met (missing class, one-sided targets)."""
