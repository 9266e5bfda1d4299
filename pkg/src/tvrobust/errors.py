"""Exception types shared across the package."""


class DomainError(ValueError):
    """A call violated an operation's contract (bad shapes, bad arguments,
    impossible conditioning, and so on)."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed the configured state-space limit."""


class ParseError(DomainError):
    """A model document could not be parsed or did not validate.

    ``location`` is a human-readable position such as ``line 3, column 7``
    or a field path such as ``cpts[2].rows[1]``.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{message} (at {location})"
        super().__init__(message)
