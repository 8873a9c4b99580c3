"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """An argument violates an operation's contract (shape, range, finiteness)."""


class ParseError(ValueError):
    """A dataset file could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpecError(ValueError):
    """A group-layout file is malformed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
