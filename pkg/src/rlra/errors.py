class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class EnumerationError(RuntimeError):
    """Raised when a fixed-point enumeration would exceed the subset cap."""
