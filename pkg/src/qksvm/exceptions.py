class InvalidArgumentError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class IngestionError(ValueError):
    """Raised when an input file cannot be turned into a dataset."""
